#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dihom {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class Sign : std::uint8_t { minus = 0, plus = 1 };

inline char sign_char(Sign s) { return s == Sign::minus ? '-' : '+'; }
inline Sign opposite(Sign s) { return s == Sign::minus ? Sign::plus : Sign::minus; }

struct CellRef {
  std::size_t dim = 0;
  std::size_t id = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

// Words over {-,0,+}; a word with k zeros names a k-face of the standard cube.
using CubeWord = std::string;

/// Per-dimension cell map, e.g. a morphism or an embedding.
using CellMap = std::vector<std::vector<std::size_t>>;

/** @brief Finite precubical set with dense per-dimension cell ids. */
class PrecubicalSet {
 public:
  PrecubicalSet() = default;

  /// Highest dimension holding at least one cell, -1 when empty.
  int dim() const {
    for (std::size_t n = counts_.size(); n-- > 0;)
      if (counts_[n] > 0) return static_cast<int>(n);
    return -1;
  }

  std::size_t levels() const { return counts_.size(); }

  std::size_t count(std::size_t n) const { return n < counts_.size() ? counts_[n] : 0; }

  std::size_t vertices() const { return count(0); }

  std::size_t total_cells() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> out(counts_.begin(), counts_.end());
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
  }

  /// Face map d^s_i : C(n) -> C(n-1), requires i < n.
  std::size_t face(std::size_t n, std::size_t c, std::size_t i, Sign s) const {
    return faces_[n][(c * n + i) * 2 + static_cast<std::size_t>(s)];
  }

  std::size_t source(std::size_t edge) const { return face(1, edge, 0, Sign::minus); }
  std::size_t target(std::size_t edge) const { return face(1, edge, 0, Sign::plus); }

  void ensure_levels(std::size_t l) {
    if (counts_.size() < l) {
      counts_.resize(l, 0);
      faces_.resize(l);
    }
  }

  std::size_t add_vertex() {
    ensure_levels(1);
    return counts_[0]++;
  }

  /// Adds an n-cube; neg[i] and pos[i] are the ids of its i-th faces in C(n-1).
  std::size_t add_cube(std::size_t n, const std::vector<std::size_t>& neg, const std::vector<std::size_t>& pos) {
    if (n == 0) return add_vertex();
    if (neg.size() != n || pos.size() != n) throw InvalidComplex("add_cube: wrong number of faces");
    ensure_levels(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      faces_[n].push_back(neg[i]);
      faces_[n].push_back(pos[i]);
    }
    if (n == 1 && !labels_.empty()) labels_.emplace_back();
    return counts_[n]++;
  }

  std::size_t add_edge(std::size_t from, std::size_t to, std::optional<std::string> label = std::nullopt) {
    std::size_t e = add_cube(1, {from}, {to});
    if (label) set_label(e, *label);
    return e;
  }

  bool has_labels() const { return !labels_.empty(); }

  const std::optional<std::string>& label(std::size_t edge) const {
    static const std::optional<std::string> none;
    return edge < labels_.size() ? labels_[edge] : none;
  }

  void set_label(std::size_t edge, std::string l) {
    if (labels_.size() < count(1)) labels_.resize(count(1));
    labels_[edge] = std::move(l);
  }

  void drop_top_levels(std::size_t keep) {
    if (counts_.size() > keep) {
      counts_.resize(keep);
      faces_.resize(keep);
    }
    if (keep < 2) labels_.clear();
  }

  friend bool operator==(const PrecubicalSet& a, const PrecubicalSet& b) {
    if (a.counts() != b.counts()) return false;
    for (std::size_t n = 1; n < std::min(a.levels(), b.levels()); ++n)
      if (a.count(n) > 0 && a.faces_[n] != b.faces_[n]) return false;
    for (std::size_t e = 0; e < a.count(1); ++e)
      if (a.label(e) != b.label(e)) return false;
    return true;
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::size_t>> faces_;
  std::vector<std::optional<std::string>> labels_;
};

inline std::size_t zeros_in(const CubeWord& w) { return static_cast<std::size_t>(std::count(w.begin(), w.end(), '0')); }

/// Image of a cell under the iterated face named by a word of its dimension; '0' letters act as identity.
inline std::size_t iterated_face(const PrecubicalSet& C, std::size_t n, std::size_t c, const CubeWord& u) {
  if (u.size() != n) throw InvalidComplex("iterated_face: word length differs from cell dimension");
  std::size_t cur = c, d = n;
  for (std::size_t i = n; i-- > 0;) {
    if (u[i] == '0') continue;
    cur = C.face(d, cur, i, u[i] == '-' ? Sign::minus : Sign::plus);
    --d;
  }
  return cur;
}

inline std::vector<CubeWord> sign_words(std::size_t n) {
  std::vector<CubeWord> out;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    CubeWord w(n, '-');
    for (std::size_t i = 0; i < n; ++i)
      if (m >> (n - 1 - i) & 1) w[i] = '+';
    out.push_back(w);
  }
  return out;
}

/// Every word over {-,0,+} of length n, ordered lexicographically with - < + < 0.
inline std::vector<CubeWord> all_words(std::size_t n) {
  std::vector<CubeWord> out{""};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<CubeWord> next;
    for (const auto& w : out)
      for (char ch : {'-', '+', '0'}) next.push_back(w + ch);
    out.swap(next);
  }
  return out;
}

/// Vertex ids of all corners of a cube, indexed like sign_words(n).
inline std::vector<std::size_t> corners(const PrecubicalSet& C, std::size_t n, std::size_t c) {
  std::vector<std::size_t> out;
  for (const auto& u : sign_words(n)) out.push_back(iterated_face(C, n, c, u));
  return out;
}

inline std::size_t max_dim_bound() {
  if (const char* env = std::getenv("DIHOM_MAX_DIM")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 0) return static_cast<std::size_t>(v);
  }
  return 6;
}

/** @brief A subcomplex of the standard cube remembering the word of each cell. */
struct WordComplex {
  PrecubicalSet pcs;
  std::vector<std::vector<CubeWord>> words;
  std::map<CubeWord, std::size_t> index;

  std::size_t id(const CubeWord& w) const {
    auto it = index.find(w);
    if (it == index.end()) throw InvalidComplex("word not in complex: " + w);
    return it->second;
  }
};

inline CubeWord word_face(const CubeWord& w, std::size_t i, Sign s) {
  CubeWord out = w;
  std::size_t seen = 0;
  for (auto& ch : out)
    if (ch == '0' && seen++ == i) {
      ch = sign_char(s);
      break;
    }
  return out;
}

/// Builds the subcomplex of the standard n-cube on the words accepted by keep (must be closed under faces).
template <class Pred>
WordComplex cube_subcomplex(std::size_t n, Pred keep) {
  if (n > max_dim_bound()) throw DimensionBound("cube dimension " + std::to_string(n) + " exceeds bound");
  WordComplex wc;
  wc.words.resize(n + 1);
  for (const auto& w : all_words(n))
    if (keep(w)) wc.words[zeros_in(w)].push_back(w);
  wc.pcs.ensure_levels(1);
  for (std::size_t k = 0; k <= n; ++k) {
    for (const auto& w : wc.words[k]) {
      std::vector<std::size_t> neg, pos;
      for (std::size_t i = 0; i < k; ++i) {
        neg.push_back(wc.id(word_face(w, i, Sign::minus)));
        pos.push_back(wc.id(word_face(w, i, Sign::plus)));
      }
      wc.index[w] = wc.pcs.add_cube(k, neg, pos);
    }
  }
  return wc;
}

inline WordComplex standard_cube_words(std::size_t n) {
  return cube_subcomplex(n, [](const CubeWord&) { return true; });
}

inline WordComplex hollow_cube_words(std::size_t n) {
  return cube_subcomplex(n, [n](const CubeWord& w) { return zeros_in(w) < n; });
}

/// Cells of the hollow cube sharing at least one letter with the sign word u.
inline WordComplex lambda_words(const CubeWord& u) {
  return cube_subcomplex(u.size(), [&u](const CubeWord& w) {
    for (std::size_t i = 0; i < u.size(); ++i)
      if (w[i] == u[i]) return true;
    return false;
  });
}

inline PrecubicalSet standard_cube(std::size_t n) { return standard_cube_words(n).pcs; }
inline PrecubicalSet hollow_cube(std::size_t n) { return hollow_cube_words(n).pcs; }
inline PrecubicalSet lambda_complex(const CubeWord& u) { return lambda_words(u).pcs; }

/// Inclusion map of a word subcomplex into a larger one over the same n.
inline CellMap word_inclusion(const WordComplex& small, const WordComplex& big) {
  CellMap m(small.words.size());
  for (std::size_t k = 0; k < small.words.size(); ++k)
    for (const auto& w : small.words[k]) m[k].push_back(big.id(w));
  return m;
}

struct FaceRelationViolation {
  std::size_t n, i, j;
  Sign eps, eps2;
  std::size_t cell;
};

/// Checks ids are in range and d^e_j d^e'_i = d^e'_i d^e_{j+1} for i <= j on every cell of dimension n+2.
inline std::vector<FaceRelationViolation> validate(const PrecubicalSet& C) {
  for (std::size_t n = 1; n < C.levels(); ++n)
    for (std::size_t c = 0; c < C.count(n); ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (Sign s : {Sign::minus, Sign::plus})
          if (C.face(n, c, i, s) >= C.count(n - 1))
            throw InvalidComplex("face id out of range at dim " + std::to_string(n) + " cell " + std::to_string(c));
  std::vector<FaceRelationViolation> out;
  for (std::size_t d = 2; d < C.levels(); ++d) {
    std::size_t n = d - 2;
    for (std::size_t x = 0; x < C.count(d); ++x)
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i; j <= n; ++j)
          for (Sign e : {Sign::minus, Sign::plus})
            for (Sign e2 : {Sign::minus, Sign::plus}) {
              std::size_t lhs = C.face(d - 1, C.face(d, x, i, e2), j, e);
              std::size_t rhs = C.face(d - 1, C.face(d, x, j + 1, e), i, e2);
              if (lhs != rhs) out.push_back({n, i, j, e, e2, x});
            }
  }
  return out;
}

/// Squares whose opposite edges carry different labels, when labels are present.
inline std::vector<std::size_t> label_violations(const PrecubicalSet& C) {
  std::vector<std::size_t> out;
  if (!C.has_labels()) return out;
  for (std::size_t a = 0; a < C.count(2); ++a)
    for (std::size_t i = 0; i < 2; ++i)
      if (C.label(C.face(2, a, i, Sign::minus)) != C.label(C.face(2, a, i, Sign::plus))) {
        out.push_back(a);
        break;
      }
  return out;
}

inline PrecubicalSet truncate(const PrecubicalSet& C, std::size_t n) {
  PrecubicalSet out = C;
  out.drop_top_levels(n + 1);
  return out;
}

/** @brief Tensor product together with the id layout of its cells. */
struct TensorProduct {
  PrecubicalSet pcs;
  std::vector<std::size_t> left_counts, right_counts;

  std::size_t id(std::size_t i, std::size_t c, std::size_t j, std::size_t d) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < i; ++a) off += cnt(left_counts, a) * cnt(right_counts, i + j - a);
    return off + c * cnt(right_counts, j) + d;
  }

 private:
  static std::size_t cnt(const std::vector<std::size_t>& v, std::size_t k) { return k < v.size() ? v[k] : 0; }
};

inline TensorProduct tensor(const PrecubicalSet& C, const PrecubicalSet& D) {
  TensorProduct t;
  t.left_counts.resize(C.levels());
  t.right_counts.resize(D.levels());
  for (std::size_t k = 0; k < C.levels(); ++k) t.left_counts[k] = C.count(k);
  for (std::size_t k = 0; k < D.levels(); ++k) t.right_counts[k] = D.count(k);
  std::size_t top = C.levels() + D.levels() >= 2 ? C.levels() + D.levels() - 1 : 0;
  t.pcs.ensure_levels(1);
  bool labelled = C.has_labels() || D.has_labels();
  for (std::size_t n = 0; n < top; ++n)
    for (std::size_t i = 0; i <= n; ++i) {
      std::size_t j = n - i;
      for (std::size_t c = 0; c < C.count(i); ++c)
        for (std::size_t d = 0; d < D.count(j); ++d) {
          std::vector<std::size_t> neg, pos;
          for (std::size_t k = 0; k < n; ++k) {
            if (k < i) {
              neg.push_back(t.id(i - 1, C.face(i, c, k, Sign::minus), j, d));
              pos.push_back(t.id(i - 1, C.face(i, c, k, Sign::plus), j, d));
            } else {
              neg.push_back(t.id(i, c, j - 1, D.face(j, d, k - i, Sign::minus)));
              pos.push_back(t.id(i, c, j - 1, D.face(j, d, k - i, Sign::plus)));
            }
          }
          std::size_t id = t.pcs.add_cube(n, neg, pos);
          if (n == 1 && labelled) {
            const auto& l = i == 1 ? C.label(c) : D.label(d);
            if (l) t.pcs.set_label(id, *l);
          }
        }
    }
  return t;
}

/** @brief Disjoint union; right cells are shifted by the left counts. */
struct Coproduct {
  PrecubicalSet pcs;
  std::vector<std::size_t> right_offset;
};

inline Coproduct coproduct(const PrecubicalSet& C, const PrecubicalSet& D) {
  Coproduct out;
  out.pcs = C;
  std::size_t L = std::max(C.levels(), D.levels());
  out.pcs.ensure_levels(std::max<std::size_t>(L, 1));
  out.right_offset.resize(L);
  for (std::size_t k = 0; k < L; ++k) out.right_offset[k] = C.count(k);
  for (std::size_t n = 0; n < D.levels(); ++n)
    for (std::size_t d = 0; d < D.count(n); ++d) {
      std::vector<std::size_t> neg, pos;
      for (std::size_t i = 0; i < n; ++i) {
        neg.push_back(D.face(n, d, i, Sign::minus) + out.right_offset[n - 1]);
        pos.push_back(D.face(n, d, i, Sign::plus) + out.right_offset[n - 1]);
      }
      std::size_t id = out.pcs.add_cube(n, neg, pos);
      if (n == 1 && D.label(d)) out.pcs.set_label(id, *D.label(d));
    }
  return out;
}

/** @brief Result of identifying vertices; vertex_map sends old vertex ids to new ones. */
struct Glued {
  PrecubicalSet pcs;
  std::vector<std::size_t> vertex_map;
};

/// Quotient by the least equivalence on vertices containing pairs. Classes are numbered by their smallest member.
inline Glued glue_vertices(const PrecubicalSet& C, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::size_t> parent(C.vertices());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : pairs) {
    if (a >= C.vertices() || b >= C.vertices()) throw InvalidComplex("glue_vertices: vertex out of range");
    std::size_t ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  Glued g;
  g.vertex_map.assign(C.vertices(), npos);
  std::vector<std::size_t> class_id(C.vertices(), npos);
  g.pcs.ensure_levels(1);
  for (std::size_t v = 0; v < C.vertices(); ++v) {
    std::size_t r = find(v);
    if (class_id[r] == npos) class_id[r] = g.pcs.add_vertex();
    g.vertex_map[v] = class_id[r];
  }
  for (std::size_t n = 1; n < C.levels(); ++n)
    for (std::size_t c = 0; c < C.count(n); ++c) {
      std::vector<std::size_t> neg, pos;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = C.face(n, c, i, Sign::minus), b = C.face(n, c, i, Sign::plus);
        neg.push_back(n == 1 ? g.vertex_map[a] : a);
        pos.push_back(n == 1 ? g.vertex_map[b] : b);
      }
      std::size_t id = g.pcs.add_cube(n, neg, pos);
      if (n == 1 && C.label(c)) g.pcs.set_label(id, *C.label(c));
    }
  return g;
}

/** @brief A subcomplex with maps to and from its parent (npos for dropped cells). */
struct Embedding {
  PrecubicalSet pcs;
  CellMap to_parent;
  CellMap from_parent;
};

/// Subcomplex of the cells accepted by keep(n, c); keep must be closed under faces.
template <class Pred>
Embedding restrict_cells(const PrecubicalSet& C, Pred keep) {
  Embedding e;
  e.to_parent.resize(C.levels());
  e.from_parent.resize(C.levels());
  e.pcs.ensure_levels(1);
  for (std::size_t n = 0; n < C.levels(); ++n) {
    e.from_parent[n].assign(C.count(n), npos);
    for (std::size_t c = 0; c < C.count(n); ++c) {
      if (!keep(n, c)) continue;
      std::vector<std::size_t> neg, pos;
      for (std::size_t i = 0; i < n; ++i) {
        neg.push_back(e.from_parent[n - 1][C.face(n, c, i, Sign::minus)]);
        pos.push_back(e.from_parent[n - 1][C.face(n, c, i, Sign::plus)]);
        if (neg.back() == npos || pos.back() == npos) throw InvalidComplex("restrict_cells: selection not closed under faces");
      }
      std::size_t id = e.pcs.add_cube(n, neg, pos);
      if (n == 1 && C.label(c)) e.pcs.set_label(id, *C.label(c));
      e.from_parent[n][c] = id;
      e.to_parent[n].push_back(c);
    }
  }
  return e;
}

/// Keeps the cubes none of whose corners lie in removed.
inline Embedding remove_vertices(const PrecubicalSet& C, const std::vector<std::size_t>& removed) {
  std::vector<char> bad(C.vertices(), 0);
  for (auto v : removed) bad.at(v) = 1;
  return restrict_cells(C, [&](std::size_t n, std::size_t c) {
    for (auto v : corners(C, n, c))
      if (bad[v]) return false;
    return true;
  });
}

/** @brief One square read as a tile a.b <> b'.a'. */
struct Tile {
  std::size_t square, a, b, b2, a2;
};

inline std::vector<Tile> tiles(const PrecubicalSet& C) {
  std::vector<Tile> out;
  for (std::size_t x = 0; x < C.count(2); ++x)
    out.push_back({x, C.face(2, x, 0, Sign::minus), C.face(2, x, 1, Sign::plus), C.face(2, x, 1, Sign::minus),
                   C.face(2, x, 0, Sign::plus)});
  return out;
}

}  // namespace dihom
