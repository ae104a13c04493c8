#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include <dihom/errors.hpp>
#include <dihom/npc.hpp>
#include <dihom/pcs.hpp>
#include <dihom/pcs_io.hpp>

namespace dihom {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Where a point sits: a cube of the source complex and a position in [0,1]^dim.
struct PointCoord {
  std::size_t dim = 0;
  std::size_t cube = npos;
  std::vector<double> pos;
};

/// A finite generalized metric space: dense matrix over [0, inf].
class FinitePointSpace {
 public:
  FinitePointSpace() = default;
  explicit FinitePointSpace(std::size_t n, double fill = inf) : n_(n), dist_(n * n, fill), coords_(n) {
    for (std::size_t i = 0; i < n; ++i) dist_[i * n + i] = 0;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t x, std::size_t y) const { return dist_[x * n_ + y]; }
  double& at(std::size_t x, std::size_t y) { return dist_[x * n_ + y]; }

  const std::vector<PointCoord>& coords() const { return coords_; }
  std::vector<PointCoord>& coords() { return coords_; }

  bool symmetric(double tol = 1e-9) const {
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = x + 1; y < n_; ++y) {
        double a = (*this)(x, y), b = (*this)(y, x);
        if (std::isinf(a) != std::isinf(b)) return false;
        if (!std::isinf(a) && std::abs(a - b) > tol) return false;
      }
    return true;
  }

  // Min-plus closure in place.
  void close() {
    for (std::size_t m = 0; m < n_; ++m)
      for (std::size_t x = 0; x < n_; ++x) {
        double dxm = dist_[x * n_ + m];
        if (std::isinf(dxm)) continue;
        double* row = &dist_[x * n_];
        const double* mrow = &dist_[m * n_];
        for (std::size_t y = 0; y < n_; ++y) row[y] = std::min(row[y], dxm + mrow[y]);
      }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<PointCoord> coords_;
};

/// Every point at infinite distance from every other.
inline FinitePointSpace discrete_space(std::size_t n) { return FinitePointSpace(n); }

struct AxiomViolation {
  enum class Kind { diagonal, negative, triangle } kind;
  std::size_t x, y, z;
  double lhs, rhs;
};

struct SpaceReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

inline SpaceReport validate_space(const FinitePointSpace& X, double tol = 1e-9) {
  SpaceReport r;
  std::size_t n = X.size();
  for (std::size_t x = 0; x < n; ++x) {
    if (X(x, x) != 0) r.violations.push_back({AxiomViolation::Kind::diagonal, x, x, x, X(x, x), 0});
    for (std::size_t y = 0; y < n; ++y)
      if (X(x, y) < 0 || std::isnan(X(x, y)))
        r.violations.push_back({AxiomViolation::Kind::negative, x, y, y, X(x, y), 0});
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      double dxy = X(x, y);
      if (std::isinf(dxy)) continue;
      for (std::size_t z = 0; z < n; ++z) {
        double dxz = X(x, z), through = dxy + X(y, z);
        if (dxz > through + tol) r.violations.push_back({AxiomViolation::Kind::triangle, x, y, z, dxz, through});
      }
    }
  return r;
}

struct Quotient {
  FinitePointSpace space;
  std::vector<std::size_t> map;  // original point -> quotient point
  FinitePointSpace one_step;     // block-to-block distances before chaining
};

/// Glue points and take the infimum over chains.
inline Quotient chain_distance(const FinitePointSpace& Y,
                               const std::vector<std::pair<std::size_t, std::size_t>>& glue) {
  std::size_t n = Y.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : glue) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  Quotient q;
  q.map.assign(n, npos);
  std::vector<std::size_t> block_of_root(n, npos);
  std::size_t blocks = 0;
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t r = find(x);
    if (block_of_root[r] == npos) block_of_root[r] = blocks++;
    q.map[x] = block_of_root[r];
  }
  FinitePointSpace W(blocks);
  std::vector<bool> seen(blocks, false);
  for (std::size_t x = 0; x < n; ++x)
    if (!seen[q.map[x]]) {
      seen[q.map[x]] = true;
      W.coords()[q.map[x]] = Y.coords()[x];
    }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      double& w = W.at(q.map[x], q.map[y]);
      w = std::min(w, Y(x, y));
    }
  q.one_step = W;
  W.close();
  q.space = std::move(W);
  return q;
}

inline FinitePointSpace symmetrize_left(const FinitePointSpace& X) {
  FinitePointSpace S = X;
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t y = 0; y < X.size(); ++y) S.at(x, y) = std::min(X(x, y), X(y, x));
  S.close();
  return S;
}

inline FinitePointSpace symmetrize_right(const FinitePointSpace& X) {
  FinitePointSpace S = X;
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t y = 0; y < X.size(); ++y) S.at(x, y) = std::max(X(x, y), X(y, x));
  return S;
}

enum class CubeMetric { linf, l2 };

inline std::string metric_name(CubeMetric m) { return m == CubeMetric::linf ? "linf" : "l2"; }

inline CubeMetric metric_from_name(const std::string& s) {
  if (s == "linf") return CubeMetric::linf;
  if (s == "l2") return CubeMetric::l2;
  throw Error("unknown metric: " + s);
}

/// Product distance between coordinate vectors; directed axes forbid decrease.
inline double product_distance(const std::vector<double>& p, const std::vector<double>& q, CubeMetric m,
                               bool directed) {
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = q[i] - p[i];
    if (directed && d < 0) return inf;
    d = std::abs(d);
    acc = m == CubeMetric::linf ? std::max(acc, d) : acc + d * d;
  }
  return m == CubeMetric::linf ? acc : std::sqrt(acc);
}

/// Finite sample of a product of (directed) lines.
inline FinitePointSpace product_samples(const std::vector<std::vector<double>>& pts, CubeMetric m = CubeMetric::linf,
                                        bool directed = true) {
  FinitePointSpace X(pts.size());
  for (std::size_t x = 0; x < pts.size(); ++x) {
    X.coords()[x].dim = pts[x].size();
    X.coords()[x].pos = pts[x];
    for (std::size_t y = 0; y < pts.size(); ++y) X.at(x, y) = product_distance(pts[x], pts[y], m, directed);
  }
  return X;
}

struct GridNode {
  std::size_t dim, cube;
  std::vector<std::size_t> idx;
};

struct RealizationGrid {
  PrecubicalSet source;
  std::size_t k = 1;
  CubeMetric metric = CubeMetric::linf;
  bool directed = false;
  FinitePointSpace space;
  FinitePointSpace one_step;
  std::vector<GridNode> nodes;
  std::vector<std::size_t> node_point;
  std::vector<std::vector<std::size_t>> point_nodes;
  std::vector<std::vector<std::size_t>> offset;  // offset[n][c] = first node of cube c

  std::size_t per_cube(std::size_t n) const {
    std::size_t r = 1;
    for (std::size_t i = 0; i < n; ++i) r *= k + 1;
    return r;
  }
  std::size_t node_of(std::size_t n, std::size_t c, const std::vector<std::size_t>& idx) const {
    std::size_t lin = 0;
    for (std::size_t i = 0; i < n; ++i) lin = lin * (k + 1) + idx[i];
    return offset[n][c] + lin;
  }
  std::size_t point_at(std::size_t n, std::size_t c, const std::vector<std::size_t>& idx) const {
    return node_point[node_of(n, c, idx)];
  }
  std::size_t vertex_point(std::size_t v) const { return node_point[offset[0][v]]; }
  std::vector<double> position(const GridNode& g) const {
    std::vector<double> p(g.idx.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(g.idx[i]) / static_cast<double>(k);
    return p;
  }
  double in_cube(const std::vector<double>& p, const std::vector<double>& q) const {
    return product_distance(p, q, metric, directed);
  }
};

inline constexpr std::size_t max_grid_nodes = 40000;

/// Sample every cube on a (k+1)^n grid, glue shared faces, chain the distances.
inline RealizationGrid realize_grid(const PrecubicalSet& C, std::size_t k, CubeMetric metric = CubeMetric::linf,
                                    bool directed = false) {
  if (k == 0) throw Error("grid resolution must be at least 1");
  auto el = check_geometric_via_elements(C);
  if (!el.geometric) throw NonGeometric("realization needs a geometric complex: " + el.detail);

  RealizationGrid rg;
  rg.source = C;
  rg.k = k;
  rg.metric = metric;
  rg.directed = directed;
  rg.offset.resize(C.levels());
  std::size_t total = 0;
  for (std::size_t n = 0; n < C.levels(); ++n) {
    rg.offset[n].resize(C.count(n));
    for (std::size_t c = 0; c < C.count(n); ++c) {
      rg.offset[n][c] = total;
      total += rg.per_cube(n);
      if (total > max_grid_nodes) throw Error("grid too large: more than " + std::to_string(max_grid_nodes) + " nodes");
    }
  }
  rg.nodes.reserve(total);
  for (std::size_t n = 0; n < C.levels(); ++n)
    for (std::size_t c = 0; c < C.count(n); ++c)
      for (std::size_t lin = 0; lin < rg.per_cube(n); ++lin) {
        std::vector<std::size_t> idx(n);
        std::size_t r = lin;
        for (std::size_t i = n; i-- > 0;) idx[i] = r % (k + 1), r /= k + 1;
        rg.nodes.push_back({n, c, std::move(idx)});
      }

  // Boundary coordinates are dropped highest axis first, down to the carrier.
  auto carrier = [&](std::size_t node) {
    GridNode g = rg.nodes[node];
    for (std::size_t i = g.dim; i-- > 0;) {
      if (g.idx[i] != 0 && g.idx[i] != k) continue;
      g.cube = C.face(g.dim, g.cube, i, g.idx[i] == 0 ? Sign::minus : Sign::plus);
      g.idx.erase(g.idx.begin() + static_cast<std::ptrdiff_t>(i));
      --g.dim;
    }
    return rg.node_of(g.dim, g.cube, g.idx);
  };

  FinitePointSpace Y(total);
  std::vector<std::pair<std::size_t, std::size_t>> glue;
  for (std::size_t n = 0; n < C.levels(); ++n)
    for (std::size_t c = 0; c < C.count(n); ++c) {
      std::size_t base = rg.offset[n][c], m = rg.per_cube(n);
      std::vector<std::vector<double>> pos(m);
      for (std::size_t a = 0; a < m; ++a) pos[a] = rg.position(rg.nodes[base + a]);
      for (std::size_t a = 0; a < m; ++a) {
        Y.coords()[base + a] = {n, c, pos[a]};
        for (std::size_t b = 0; b < m; ++b) Y.at(base + a, base + b) = rg.in_cube(pos[a], pos[b]);
      }
    }
  for (std::size_t node = 0; node < total; ++node) {
    std::size_t car = carrier(node);
    if (car != node) glue.emplace_back(node, car);
  }

  auto q = chain_distance(Y, glue);
  rg.space = std::move(q.space);
  rg.one_step = std::move(q.one_step);
  rg.node_point = std::move(q.map);
  rg.point_nodes.assign(rg.space.size(), {});
  for (std::size_t node = 0; node < total; ++node) {
    rg.point_nodes[rg.node_point[node]].push_back(node);
    if (carrier(node) == node) {
      const auto& g = rg.nodes[node];
      rg.space.coords()[rg.node_point[node]] = {g.dim, g.cube, rg.position(g)};
      rg.one_step.coords()[rg.node_point[node]] = rg.space.coords()[rg.node_point[node]];
    }
  }
  return rg;
}

struct LocalDistanceViolation {
  std::size_t y;
  double global, local;
};

struct LocalDistanceReport {
  double epsilon = inf;
  std::size_t checked = 0;
  double max_error = 0;
  std::vector<LocalDistanceViolation> violations;
  bool holds() const { return violations.empty(); }
};

/// Distance from the point to the nearest face, over every cube holding it.
inline double escape_distance(const RealizationGrid& rg, std::size_t x) {
  double eps = inf;
  for (auto node : rg.point_nodes[x]) {
    const auto& g = rg.nodes[node];
    auto t = rg.position(g);
    for (double ti : t)
      for (double s : {0.0, 1.0})
        if (ti != s) eps = std::min(eps, std::abs(ti - s));
  }
  return eps;
}

inline LocalDistanceReport check_local_distance(const RealizationGrid& rg, std::size_t x, double tol = 1e-9) {
  LocalDistanceReport r;
  r.epsilon = escape_distance(rg, x);
  for (std::size_t y = 0; y < rg.space.size(); ++y) {
    double g = rg.space(x, y);
    if (!(g < r.epsilon)) continue;
    ++r.checked;
    double local = inf;
    bool every_cube_holds_x = true;
    for (auto ny : rg.point_nodes[y]) {
      const auto& gy = rg.nodes[ny];
      bool found = false;
      for (auto nx : rg.point_nodes[x]) {
        const auto& gx = rg.nodes[nx];
        if (gx.dim != gy.dim || gx.cube != gy.cube) continue;
        found = true;
        local = std::min(local, rg.in_cube(rg.position(gx), rg.position(gy)));
      }
      every_cube_holds_x = every_cube_holds_x && found;
    }
    double err = std::isinf(local) ? inf : std::abs(local - g);
    r.max_error = std::max(r.max_error, err);
    if (!every_cube_holds_x || err > tol) r.violations.push_back({y, g, local});
  }
  return r;
}

namespace detail {

// Shortest grid path as a polyline, preferring long straight hops.
inline std::vector<std::size_t> grid_geodesic(const RealizationGrid& rg, std::size_t u, std::size_t v) {
  std::vector<std::size_t> path{u};
  const auto& D = rg.space;
  const auto& W = rg.one_step;
  while (u != v) {
    std::size_t best = npos;
    double best_len = -1, target = D(u, v);
    for (std::size_t w = 0; w < D.size(); ++w) {
      if (w == u || std::isinf(W(u, w))) continue;
      double via = W(u, w) + D(w, v);
      if (std::abs(via - target) > 1e-9 * std::max(1.0, target)) continue;
      if (W(u, w) > best_len) best_len = W(u, w), best = w;
    }
    if (best == npos) throw Error("no geodesic between grid points");
    path.push_back(u = best);
  }
  return path;
}

struct CubePoint {
  std::size_t dim, cube;
  std::vector<double> pos;
};

// A pair of nodes in a common cube, realizing the one-step distance.
inline std::pair<std::size_t, std::size_t> common_nodes(const RealizationGrid& rg, std::size_t a, std::size_t b) {
  std::pair<std::size_t, std::size_t> best{npos, npos};
  double bd = inf;
  for (auto na : rg.point_nodes[a])
    for (auto nb : rg.point_nodes[b]) {
      const auto &ga = rg.nodes[na], &gb = rg.nodes[nb];
      if (ga.dim != gb.dim || ga.cube != gb.cube) continue;
      double d = rg.in_cube(rg.position(ga), rg.position(gb));
      if (d < bd) bd = d, best = {na, nb};
    }
  return best;
}

struct Polyline {
  std::vector<std::size_t> points;
  std::vector<double> cumulative;  // arclength at each vertex
  double length() const { return cumulative.back(); }
};

inline Polyline polyline(const RealizationGrid& rg, std::size_t u, std::size_t v) {
  Polyline p;
  p.points = grid_geodesic(rg, u, v);
  p.cumulative.push_back(0);
  for (std::size_t i = 0; i + 1 < p.points.size(); ++i)
    p.cumulative.push_back(p.cumulative.back() + rg.one_step(p.points[i], p.points[i + 1]));
  return p;
}

inline CubePoint locate(const RealizationGrid& rg, const Polyline& line, double s) {
  std::size_t i = 0;
  while (i + 2 < line.points.size() && line.cumulative[i + 1] < s) ++i;
  if (line.points.size() == 1) {
    const auto& g = rg.nodes[rg.point_nodes[line.points[0]].front()];
    return {g.dim, g.cube, rg.position(g)};
  }
  auto [na, nb] = common_nodes(rg, line.points[i], line.points[i + 1]);
  const auto &ga = rg.nodes[na], &gb = rg.nodes[nb];
  double seg = line.cumulative[i + 1] - line.cumulative[i];
  double lam = seg > 0 ? std::clamp((s - line.cumulative[i]) / seg, 0.0, 1.0) : 0.0;
  auto pa = rg.position(ga), pb = rg.position(gb);
  std::vector<double> pos(pa.size());
  for (std::size_t j = 0; j < pos.size(); ++j) pos[j] = (1 - lam) * pa[j] + lam * pb[j];
  return {ga.dim, ga.cube, pos};
}

// Every cube holding the point, with its position there.
inline std::vector<CubePoint> lifts(const RealizationGrid& rg, const CubePoint& p) {
  std::vector<CubePoint> out{p};
  for (std::size_t at = 0; at < out.size(); ++at) {
    auto cur = out[at];
    std::size_t n = cur.dim + 1;
    if (n >= rg.source.levels()) continue;
    for (std::size_t c = 0; c < rg.source.count(n); ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (Sign s : {Sign::minus, Sign::plus}) {
          if (rg.source.face(n, c, i, s) != cur.cube) continue;
          auto pos = cur.pos;
          pos.insert(pos.begin() + static_cast<std::ptrdiff_t>(i), s == Sign::minus ? 0.0 : 1.0);
          bool dup = false;
          for (auto& o : out) dup = dup || (o.dim == n && o.cube == c && o.pos == pos);
          if (!dup) out.push_back({n, c, std::move(pos)});
        }
  }
  return out;
}

// Faces of a cube as (dim, id, word), the cube itself excluded.
inline std::vector<std::tuple<std::size_t, std::size_t, CubeWord>> proper_faces(const PrecubicalSet& C, std::size_t n,
                                                                             std::size_t c) {
  std::vector<std::tuple<std::size_t, std::size_t, CubeWord>> out;
  for (const auto& w : all_words(n)) {
    std::size_t m = zeros_in(w);
    if (m < n) out.emplace_back(m, iterated_face(C, n, c, w), w);
  }
  return out;
}

inline std::vector<double> embed(const CubeWord& w, const std::vector<double>& t) {
  std::vector<double> pos(w.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < w.size(); ++i) pos[i] = w[i] == '0' ? t[j++] : w[i] == '-' ? 0.0 : 1.0;
  return pos;
}

inline constexpr std::size_t face_samples = 64;

// One crossing through a shared face, minimized over a fine sample of the face.
inline double through_shared_face(const RealizationGrid& rg, const CubePoint& p, const CubePoint& q) {
  double best = inf;
  auto fq = proper_faces(rg.source, q.dim, q.cube);
  for (const auto& [m, f, wp] : proper_faces(rg.source, p.dim, p.cube)) {
    if (m > 2) continue;
    std::size_t res = m == 0 ? 1 : m == 1 ? face_samples : face_samples / 4;
    for (const auto& [m2, f2, wq] : fq) {
      if (m2 != m || f2 != f) continue;
      std::size_t total = m == 0 ? 1 : m == 1 ? res + 1 : (res + 1) * (res + 1);
      for (std::size_t s = 0; s < total; ++s) {
        std::vector<double> t(m);
        std::size_t r = s;
        for (std::size_t i = 0; i < m; ++i) t[i] = static_cast<double>(r % (res + 1)) / static_cast<double>(res), r /= res + 1;
        best = std::min(best, rg.in_cube(p.pos, embed(wp, t)) + rg.in_cube(embed(wq, t), q.pos));
      }
    }
  }
  return best;
}

inline double point_distance(const RealizationGrid& rg, const CubePoint& p0, const CubePoint& q0) {
  double best = inf;
  auto ps = lifts(rg, p0), qs = lifts(rg, q0);
  for (const auto& p : ps)
    for (const auto& q : qs) {
      if (p.dim == q.dim && p.cube == q.cube)
        best = std::min(best, rg.in_cube(p.pos, q.pos));
      else
        best = std::min(best, through_shared_face(rg, p, q));
    }
  // longer routes go through grid nodes
  const auto &p = ps.front(), &q = qs.front();
  std::size_t mp = rg.per_cube(p.dim), mq = rg.per_cube(q.dim);
  std::size_t bp = rg.offset[p.dim][p.cube], bq = rg.offset[q.dim][q.cube];
  std::vector<double> to_p(mp), from_q(mq);
  for (std::size_t a = 0; a < mp; ++a) to_p[a] = rg.in_cube(p.pos, rg.position(rg.nodes[bp + a]));
  for (std::size_t b = 0; b < mq; ++b) from_q[b] = rg.in_cube(rg.position(rg.nodes[bq + b]), q.pos);
  for (std::size_t a = 0; a < mp; ++a) {
    if (to_p[a] >= best) continue;
    std::size_t pa = rg.node_point[bp + a];
    for (std::size_t b = 0; b < mq; ++b)
      best = std::min(best, to_p[a] + rg.space(pa, rg.node_point[bq + b]) + from_q[b]);
  }
  return best;
}

}  // namespace detail

struct Cat0Witness {
  std::size_t side_p, side_q;
  double s_p, s_q;  // arclength along each side
  double distance, comparison, gap;
};

struct Cat0Result {
  bool pass = true;
  std::size_t samples = 0;
  std::array<double, 3> sides{};  // |xy|, |yz|, |zx|
  double max_gap = 0;
  std::optional<Cat0Witness> worst;
};

/// Sample pairs on distinct sides of a grid-geodesic triangle and compare with the flat triangle.
inline Cat0Result cat0_triangle_check(const RealizationGrid& rg, std::size_t x, std::size_t y, std::size_t z,
                                      std::size_t sample_count = 200, double tol = 0.05, std::uint64_t seed = 1) {
  if (!rg.space.symmetric()) throw Error("comparison triangles need a symmetric space");
  Cat0Result r;
  std::array<std::size_t, 3> v{x, y, z};
  for (int i = 0; i < 3; ++i) {
    r.sides[i] = rg.space(v[i], v[(i + 1) % 3]);
    if (std::isinf(r.sides[i])) throw Error("triangle vertices at infinite distance");
  }
  if (*std::min_element(r.sides.begin(), r.sides.end()) <= 0) return r;

  double c = r.sides[0], a = r.sides[1], b = r.sides[2];
  double zx = (b * b + c * c - a * a) / (2 * c);
  std::array<std::array<double, 2>, 3> bar{{{0, 0}, {c, 0}, {zx, std::sqrt(std::max(0.0, b * b - zx * zx))}}};

  std::array<detail::Polyline, 3> lines;
  for (int i = 0; i < 3; ++i) lines[i] = detail::polyline(rg, v[i], v[(i + 1) % 3]);

  auto flat = [&](int side, double s) {
    double lam = s / lines[side].length();
    const auto &p = bar[side], &q = bar[(side + 1) % 3];
    return std::array<double, 2>{(1 - lam) * p[0] + lam * q[0], (1 - lam) * p[1] + lam * q[1]};
  };
  auto test = [&](int i, double fi, int j, double fj) {
    double si = fi * lines[i].length(), sj = fj * lines[j].length();
    double d = detail::point_distance(rg, detail::locate(rg, lines[i], si), detail::locate(rg, lines[j], sj));
    auto p = flat(i, si), q = flat(j, sj);
    double dbar = std::hypot(p[0] - q[0], p[1] - q[1]);
    double gap = d - dbar;
    ++r.samples;
    if (!r.worst || gap > r.worst->gap) r.worst = Cat0Witness{std::size_t(i), std::size_t(j), si, sj, d, dbar, gap};
    r.max_gap = std::max(r.max_gap, gap);
    if (gap > tol) r.pass = false;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < sample_count; ++n) {
    int i = static_cast<int>(n % 3), j = (i + 1) % 3;
    if (n < 3)
      test(i, 0.5, j, 0.5);
    else {
      double fi = unit(rng), fj = unit(rng);
      test(i, fi, j, fj);
    }
  }
  return r;
}

inline nlohmann::json to_json(const FinitePointSpace& X) {
  nlohmann::json pts = nlohmann::json::array(), dist = nlohmann::json::array();
  for (std::size_t x = 0; x < X.size(); ++x) {
    const auto& c = X.coords()[x];
    nlohmann::json p = {{"id", x}, {"pos", c.pos}};
    if (c.cube != npos) p["dim"] = c.dim, p["cube"] = c.cube;
    pts.push_back(std::move(p));
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t y = 0; y < X.size(); ++y) {
      if (std::isinf(X(x, y)))
        row.push_back(nullptr);
      else
        row.push_back(X(x, y));
    }
    dist.push_back(std::move(row));
  }
  return {{"points", pts}, {"dist", dist}};
}

inline FinitePointSpace space_from_json(const nlohmann::json& j) {
  const auto& dist = j.at("dist");
  FinitePointSpace X(dist.size());
  for (std::size_t x = 0; x < dist.size(); ++x) {
    if (dist[x].size() != dist.size()) throw Error("distance matrix is not square");
    for (std::size_t y = 0; y < dist.size(); ++y)
      X.at(x, y) = dist[x][y].is_null() ? inf : dist[x][y].get<double>();
  }
  if (j.contains("points"))
    for (std::size_t x = 0; x < std::min(dist.size(), j["points"].size()); ++x) {
      const auto& p = j["points"][x];
      auto& c = X.coords()[x];
      if (p.contains("pos")) c.pos = p["pos"].get<std::vector<double>>();
      if (p.contains("cube")) c.cube = p["cube"].get<std::size_t>(), c.dim = p["dim"].get<std::size_t>();
    }
  return X;
}

inline std::string to_csv(const FinitePointSpace& X) {
  std::ostringstream out;
  out << std::setprecision(12);
  for (std::size_t x = 0; x < X.size(); ++x) {
    for (std::size_t y = 0; y < X.size(); ++y) {
      if (y) out << ',';
      if (std::isinf(X(x, y)))
        out << "inf";
      else
        out << X(x, y);
    }
    out << '\n';
  }
  return out.str();
}

/// FNV-1a over the compact JSON of the complex, as 16 hex digits.
inline std::string complex_hash(const PrecubicalSet& C) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(C).dump()) h = (h ^ ch) * 1099511628211ull;
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline nlohmann::json to_json(const RealizationGrid& rg) {
  return {{"source_hash", complex_hash(rg.source)},
          {"k", rg.k},
          {"metric", metric_name(rg.metric)},
          {"directed", rg.directed},
          {"space", to_json(rg.space)}};
}

}  // namespace dihom
