#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "morphism.hpp"
#include "pcs.hpp"

namespace dihom {

/** @brief Presimplicial set graded by number of vertices: an n-simplex has faces d_0..d_{n-1}. */
class PresimplicialSet {
 public:
  std::size_t levels() const { return counts_.size(); }
  std::size_t count(std::size_t n) const { return n < counts_.size() ? counts_[n] : 0; }
  std::size_t arity(std::size_t n) const { return n; }
  std::size_t face(std::size_t n, std::size_t s, std::size_t i) const { return faces_[n][s * n + i]; }

  int dim() const {
    for (std::size_t n = counts_.size(); n-- > 0;)
      if (counts_[n] > 0) return static_cast<int>(n);
    return -1;
  }

  std::size_t add(std::size_t n, const std::vector<std::size_t>& faces) {
    if (faces.size() != n) throw InvalidComplex("simplex face count mismatch");
    if (counts_.size() <= n) {
      counts_.resize(n + 1, 0);
      faces_.resize(n + 1);
    }
    faces_[n].insert(faces_[n].end(), faces.begin(), faces.end());
    return counts_[n]++;
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::size_t>> faces_;
};

/// Violations of d_i d_j = d_{j-1} d_i (i < j), as (dimension, simplex, i, j).
inline std::vector<std::array<std::size_t, 4>> validate(const PresimplicialSet& S) {
  std::vector<std::array<std::size_t, 4>> out;
  for (std::size_t n = 2; n < S.levels(); ++n)
    for (std::size_t s = 0; s < S.count(n); ++s)
      for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
          if (S.face(n - 1, S.face(n, s, j), i) != S.face(n - 1, S.face(n, s, i), j - 1)) out.push_back({n, s, i, j});
  return out;
}

struct SimplicialFaces {
  const PresimplicialSet& S;
  std::size_t levels() const { return S.levels(); }
  std::size_t count(std::size_t d) const { return S.count(d); }
  std::size_t arity(std::size_t d) const { return d; }
  std::size_t face(std::size_t d, std::size_t c, std::size_t j) const { return S.face(d, c, j); }
};

/** @brief Simplex on n vertices (subsets of [n]) or its boundary, with subset masks per simplex. */
struct SubsetComplex {
  PresimplicialSet set;
  std::vector<std::vector<unsigned>> masks;
};

inline SubsetComplex subset_simplex(std::size_t n, bool hollow) {
  SubsetComplex z;
  z.masks.resize(n + 1);
  std::map<unsigned, std::size_t> id;
  for (std::size_t k = 0; k <= n; ++k) {
    if (hollow && k == n) break;
    for (unsigned m = 0; m < (1u << n); ++m) {
      if (static_cast<std::size_t>(__builtin_popcount(m)) != k) continue;
      std::vector<std::size_t> faces;
      for (std::size_t i = 0; i < n; ++i)
        if (m >> i & 1) faces.push_back(id.at(m & ~(1u << i)));
      id[m] = z.set.add(k, faces);
      z.masks[k].push_back(m);
    }
  }
  return z;
}

/// Link of a vertex: simplices (u, y) with y an n-cube and u a sign word whose iterated face of y is x.
inline PresimplicialSet link(const PrecubicalSet& C, std::size_t x,
                             std::vector<std::vector<std::pair<CubeWord, std::size_t>>>* names = nullptr) {
  PresimplicialSet S;
  std::map<std::pair<CubeWord, std::size_t>, std::size_t> id;
  std::vector<std::vector<std::pair<CubeWord, std::size_t>>> local;
  for (std::size_t n = 0; n < C.levels(); ++n) {
    local.emplace_back();
    auto words = sign_words(n);
    for (std::size_t y = 0; y < C.count(n); ++y)
      for (const auto& u : words) {
        if (iterated_face(C, n, y, u) != x) continue;
        std::vector<std::size_t> faces;
        for (std::size_t i = 0; i < n; ++i) {
          CubeWord v = u;
          v.erase(i, 1);
          faces.push_back(id.at({v, C.face(n, y, i, u[i] == '-' ? Sign::minus : Sign::plus)}));
        }
        id[{u, y}] = S.add(n, faces);
        local.back().push_back({u, y});
      }
  }
  if (names) *names = std::move(local);
  return S;
}

/** @brief First hollow simplex with no filler or with several. */
struct FlagResult {
  bool flag = true;
  std::size_t n = 0;
  std::size_t fillers = 0;
  CellMap boundary;
};

inline FlagResult is_flag(const PresimplicialSet& S) {
  FlagResult r;
  int d = S.dim();
  for (std::size_t n = 3; static_cast<int>(n) <= d + 2; ++n) {
    auto hollow = subset_simplex(n, true);
    auto full = subset_simplex(n, false);
    HomSearch<SimplicialFaces, SimplicialFaces> search(SimplicialFaces{hollow.set}, SimplicialFaces{S});
    search.run([&](const CellMap& h) {
      HomSearch<SimplicialFaces, SimplicialFaces> ext(SimplicialFaces{full.set}, SimplicialFaces{S});
      // subset ids agree between the hollow and the full simplex below the top dimension
      for (std::size_t k = 0; k < h.size(); ++k)
        for (std::size_t c = 0; c < h[k].size(); ++c) ext.preset(k, c, h[k][c]);
      std::size_t fillers = 0;
      ext.run([&](const CellMap&) { return ++fillers < 2; });
      if (fillers != 1) {
        r = {false, n, fillers, h};
        return false;
      }
      return true;
    });
    if (!r.flag) return r;
  }
  return r;
}

/** @brief Local conditions characterising geometric 2-dimensional complexes.
 *
 * Endpoint and diagonal pairs are compared unordered, so anti-parallel edges x -> y, y -> x count as parallel and an
 * edge joining opposite corners of a square is reported; both configurations lack a greatest common face.
 */
struct GeometricityReport {
  std::vector<std::size_t> looping_edges;
  std::vector<std::size_t> folded_squares;
  std::vector<std::pair<std::size_t, std::size_t>> parallel_edges;
  std::vector<std::pair<std::size_t, std::size_t>> pinned_squares;
  std::vector<std::pair<std::size_t, std::size_t>> diagonal_edges;  // (edge, square)
  // (corner word of the horn, the two distinct squares closing it)
  std::vector<std::tuple<CubeWord, std::size_t, std::size_t>> square_closing_not_unique;

  bool no_looping_edge() const { return looping_edges.empty(); }
  bool no_folded_square() const { return folded_squares.empty(); }
  bool no_parallel_edges() const { return parallel_edges.empty(); }
  bool no_pinned_squares() const { return pinned_squares.empty(); }
  bool no_diagonal_edges() const { return diagonal_edges.empty(); }
  bool at_most_one_square_closing() const { return square_closing_not_unique.empty(); }
  bool geometric() const {
    return no_looping_edge() && no_folded_square() && no_parallel_edges() && no_pinned_squares() &&
           no_diagonal_edges() && at_most_one_square_closing();
  }
};

inline GeometricityReport geometricity_report(const PrecubicalSet& C) {
  if (C.dim() > 2) throw InvalidComplex("geometricity_report expects a 2-truncated complex");
  GeometricityReport r;
  auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ends;
  for (std::size_t e = 0; e < C.count(1); ++e) {
    if (C.source(e) == C.target(e)) r.looping_edges.push_back(e);
    auto [it, fresh] = ends.insert({key(C.source(e), C.target(e)), e});
    if (!fresh) r.parallel_edges.push_back({it->second, e});
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> diagonals;
  for (std::size_t x = 0; x < C.count(2); ++x) {
    auto k = corners(C, 2, x);  // --, -+, +-, ++
    if (k[0] == k[3] || k[1] == k[2]) {
      r.folded_squares.push_back(x);
      continue;
    }
    bool pinned = false;
    for (auto d : {key(k[0], k[3]), key(k[1], k[2])}) {
      auto [it, fresh] = diagonals.insert({d, x});
      if (!fresh && !pinned) {
        r.pinned_squares.push_back({it->second, x});
        pinned = true;
      }
      auto e = ends.find(d);
      if (e != ends.end()) r.diagonal_edges.push_back({e->second, x});
    }
  }
  auto square = standard_cube_words(2);
  for (const auto& u : sign_words(2)) {
    auto horn = lambda_words(u);
    auto incl = word_inclusion(horn, square);
    for (const auto& h : find_morphisms(horn.pcs, C)) {
      auto st = lift_status(C, square.pcs, incl, h, 2);
      if (st.count > 1) r.square_closing_not_unique.push_back({u, st.lifts[0][2][0], st.lifts[1][2][0]});
    }
  }
  return r;
}

/** @brief Outcome of the elements-poset test; failure names two faces of a cell or two cells without a meet. */
struct ElementsCheck {
  bool geometric = true;
  bool self_intersecting = false;
  CellRef a, b;
  std::string detail;
};

inline ElementsCheck check_geometric_via_elements(const PrecubicalSet& C) {
  ElementsCheck r;
  std::vector<std::vector<std::vector<CellRef>>> down(C.levels());
  for (std::size_t n = 0; n < C.levels(); ++n) {
    auto words = all_words(n);
    down[n].resize(C.count(n));
    for (std::size_t c = 0; c < C.count(n); ++c) {
      std::map<CellRef, CubeWord> seen;
      for (const auto& w : words) {
        CellRef f{zeros_in(w), iterated_face(C, n, c, w)};
        auto [it, fresh] = seen.insert({f, w});
        if (!fresh) {
          r.geometric = false;
          r.self_intersecting = true;
          r.a = r.b = {n, c};
          r.detail = "faces " + it->second + " and " + w + " of cell " + std::to_string(c) + " in dimension " +
                     std::to_string(n) + " coincide";
          return r;
        }
        down[n][c].push_back(f);
      }
      std::sort(down[n][c].begin(), down[n][c].end());
    }
  }
  std::vector<std::vector<CellRef>> star(C.vertices());
  for (std::size_t n = 0; n < C.levels(); ++n)
    for (std::size_t c = 0; c < C.count(n); ++c)
      for (const auto& f : down[n][c])
        if (f.dim == 0) star[f.id].push_back({n, c});
  std::set<std::pair<CellRef, CellRef>> done;
  for (std::size_t v = 0; v < C.vertices(); ++v)
    for (std::size_t p = 0; p < star[v].size(); ++p)
      for (std::size_t q = p + 1; q < star[v].size(); ++q) {
        CellRef y = star[v][p], z = star[v][q];
        if (!done.insert({y, z}).second) continue;
        const auto& fy = down[y.dim][y.id];
        const auto& fz = down[z.dim][z.id];
        std::vector<CellRef> common;
        std::set_intersection(fy.begin(), fy.end(), fz.begin(), fz.end(), std::back_inserter(common));
        bool has_meet = false;
        for (const auto& m : common)
          if (down[m.dim][m.id].size() == common.size()) has_meet = true;
        if (!has_meet) {
          r.geometric = false;
          r.a = y;
          r.b = z;
          r.detail = "cells (" + std::to_string(y.dim) + "," + std::to_string(y.id) + ") and (" + std::to_string(z.dim) +
                     "," + std::to_string(z.id) + ") have no greatest common face";
          return r;
        }
      }
  return r;
}

/** @brief A morphism from a template that fails the required lifting count. */
struct LiftWitness {
  CubeWord horn;
  std::size_t k = 0;
  CellMap map;
  std::size_t lifts = 0;
};

struct CubePropertyResult {
  bool holds = true;
  std::optional<LiftWitness> witness;
  bool liftings_unique = true;  // every lifting found was the only one
};

inline const std::vector<CubeWord>& cube_property_horns() {
  static const std::vector<CubeWord> h{"+-+", "-+-", "---", "+++"};
  return h;
}

inline CubePropertyResult check_cube_property(const PrecubicalSet& C) {
  CubePropertyResult r;
  auto hollow = hollow_cube_words(3);
  for (const auto& u : cube_property_horns()) {
    auto horn = lambda_words(u);
    auto incl = word_inclusion(horn, hollow);
    for (const auto& h : find_morphisms(horn.pcs, C)) {
      auto st = lift_status(C, hollow.pcs, incl, h, 0);
      if (st.count > 1) r.liftings_unique = false;
      if (st.count == 0) {
        r.holds = false;
        r.witness = LiftWitness{u, 3, h, 0};
        return r;
      }
    }
  }
  return r;
}

struct FillingResult {
  bool holds = true;
  std::optional<LiftWitness> witness;
};

/// For k >= 3 every hollow k-cube has exactly one filler; for k = 2 at most one.
inline FillingResult unique_filling(const PrecubicalSet& C, std::size_t k) {
  if (k < 2) throw InvalidComplex("unique_filling needs k >= 2");
  FillingResult r;
  auto full = standard_cube_words(k);
  auto hollow = hollow_cube_words(k);
  auto incl = word_inclusion(hollow, full);
  HomSearch<CubicalFaces, CubicalFaces> search(CubicalFaces{hollow.pcs}, CubicalFaces{C});
  search.run([&](const CellMap& h) {
    auto st = lift_status(C, full.pcs, incl, h, 0);
    bool ok = k == 2 ? st.count <= 1 : st.count == 1;
    if (!ok) {
      r.holds = false;
      r.witness = LiftWitness{"", k, h, st.count};
      return false;
    }
    return true;
  });
  return r;
}

/** @brief Non-positive curvature by the axioms and, independently, by flag links. */
struct NpcVerdict {
  bool geometric = false;
  bool cube_property = false;
  std::map<std::size_t, bool> unique_fillings;
  bool flag_links = false;
  std::string flag_agreement;  // "agree", "disagree" or "not applicable"
  std::vector<std::string> witnesses;

  bool fillings_ok() const {
    for (auto& [k, v] : unique_fillings)
      if (!v) return false;
    return true;
  }
  bool npc() const { return geometric && cube_property && fillings_ok(); }
  bool axioms_without_geometricity() const { return cube_property && fillings_ok(); }
};

namespace detail {

inline std::string describe(const CellMap& m) {
  std::ostringstream os;
  for (std::size_t n = 0; n < m.size(); ++n) {
    os << (n ? " | " : "") << "dim" << n << ":";
    for (auto c : m[n]) os << ' ' << c;
  }
  return os.str();
}

}  // namespace detail

inline NpcVerdict npc_verdict(const PrecubicalSet& C) {
  NpcVerdict v;
  auto el = check_geometric_via_elements(C);
  v.geometric = el.geometric;
  if (!el.geometric) v.witnesses.push_back("not geometric: " + el.detail);
  auto cube = check_cube_property(C);
  v.cube_property = cube.holds;
  if (!cube.holds)
    v.witnesses.push_back("horn " + cube.witness->horn + " does not extend: " + detail::describe(cube.witness->map));
  for (std::size_t k = 3; static_cast<int>(k) <= C.dim() + 1; ++k) {
    auto f = unique_filling(C, k);
    v.unique_fillings[k] = f.holds;
    if (!f.holds)
      v.witnesses.push_back("hollow " + std::to_string(k) + "-cube with " + std::to_string(f.witness->lifts) +
                            " fillers: " + detail::describe(f.witness->map));
  }
  v.flag_links = true;
  for (std::size_t x = 0; x < C.vertices(); ++x) {
    auto fr = is_flag(link(C, x));
    if (!fr.flag) {
      v.flag_links = false;
      v.witnesses.push_back("link of vertex " + std::to_string(x) + " not flag: hollow simplex on " +
                            std::to_string(fr.n) + " vertices has " + std::to_string(fr.fillers) + " fillers");
      break;
    }
  }
  if (!v.geometric)
    v.flag_agreement = "not applicable";
  else
    v.flag_agreement = v.axioms_without_geometricity() == v.flag_links ? "agree" : "disagree";
  return v;
}

inline nlohmann::json to_json(const NpcVerdict& v) {
  nlohmann::json fill = nlohmann::json::object();
  for (auto& [k, b] : v.unique_fillings) fill[std::to_string(k)] = b;
  return {{"geometric", v.geometric}, {"cube_property", v.cube_property}, {"unique_fillings", fill},
          {"flag_links", v.flag_links}, {"npc", v.npc()},      {"flag_agreement", v.flag_agreement},
          {"witnesses", v.witnesses}};
}

inline nlohmann::json to_json(const GeometricityReport& r) {
  return {{"no_looping_edge", r.no_looping_edge()},
          {"no_folded_square", r.no_folded_square()},
          {"no_parallel_edges", r.no_parallel_edges()},
          {"no_pinned_squares", r.no_pinned_squares()},
          {"no_diagonal_edges", r.no_diagonal_edges()},
          {"at_most_one_square_closing", r.at_most_one_square_closing()},
          {"geometric", r.geometric()}};
}

}  // namespace dihom
