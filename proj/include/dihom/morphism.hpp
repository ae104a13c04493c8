#pragma once

#include <functional>
#include <vector>

#include "pcs.hpp"

namespace dihom {

// A graded set with numbered face maps: levels(), count(d), arity(d), face(d, c, j).
// Precubical sets expose face j as d^{j%2}_{j/2}.
struct CubicalFaces {
  const PrecubicalSet& C;
  std::size_t levels() const { return C.levels(); }
  std::size_t count(std::size_t d) const { return C.count(d); }
  std::size_t arity(std::size_t d) const { return 2 * d; }
  std::size_t face(std::size_t d, std::size_t c, std::size_t j) const {
    return C.face(d, c, j / 2, j % 2 ? Sign::plus : Sign::minus);
  }
};

/** @brief Backtracking search for face-preserving maps between graded sets. */
template <class Src, class Tgt>
class HomSearch {
 public:
  HomSearch(Src src, Tgt tgt) : src_(src), tgt_(tgt) {
    map_.resize(src_.levels());
    for (std::size_t d = 0; d < src_.levels(); ++d) map_[d].assign(src_.count(d), npos);
    cofaces_.resize(tgt_.levels());
    for (std::size_t d = 1; d < tgt_.levels(); ++d) {
      cofaces_[d].resize(tgt_.arity(d));
      for (std::size_t j = 0; j < tgt_.arity(d); ++j) {
        cofaces_[d][j].resize(tgt_.count(d - 1));
        for (std::size_t z = 0; z < tgt_.count(d); ++z) cofaces_[d][j][tgt_.face(d, z, j)].push_back(z);
      }
    }
  }

  /// Fixes src cell (d, c) to t and propagates to faces. Returns false on conflict.
  bool preset(std::size_t d, std::size_t c, std::size_t t) { return assign(d, c, t); }

  /// Calls visit for each total extension of the preset cells; visit returns false to stop.
  void run(const std::function<bool(const CellMap&)>& visit) {
    stop_ = false;
    recurse(visit);
  }

 private:
  bool assign(std::size_t d, std::size_t c, std::size_t t) {
    if (d >= tgt_.levels() || t >= tgt_.count(d)) return false;
    if (map_[d][c] != npos) return map_[d][c] == t;
    map_[d][c] = t;
    trail_.push_back({d, c});
    for (std::size_t j = 0; j < src_.arity(d); ++j)
      if (!assign(d - 1, src_.face(d, c, j), tgt_.face(d, t, j))) return false;
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      auto [d, c] = trail_.back();
      map_[d][c] = npos;
      trail_.pop_back();
    }
  }

  void recurse(const std::function<bool(const CellMap&)>& visit) {
    if (stop_) return;
    // Highest unassigned cell, preferring one with an assigned face.
    std::size_t bd = npos, bc = npos, bj = npos;
    for (std::size_t d = src_.levels(); d-- > 0 && bd == npos;)
      for (std::size_t c = 0; c < src_.count(d); ++c) {
        if (map_[d][c] != npos) continue;
        std::size_t jj = npos;
        for (std::size_t j = 0; j < src_.arity(d); ++j)
          if (map_[d - 1][src_.face(d, c, j)] != npos) {
            jj = j;
            break;
          }
        if (bc == npos || (bj == npos && jj != npos)) {
          bd = d;
          bc = c;
          bj = jj;
          if (jj != npos) break;
        }
      }
    if (bd == npos) {
      if (!visit(map_)) stop_ = true;
      return;
    }
    if (bd >= tgt_.levels()) return;
    auto attempt = [&](std::size_t t) {
      std::size_t mark = trail_.size();
      if (assign(bd, bc, t)) recurse(visit);
      undo(mark);
    };
    if (bj != npos) {
      const auto& cands = cofaces_[bd][bj][map_[bd - 1][src_.face(bd, bc, bj)]];
      for (auto t : cands) {
        attempt(t);
        if (stop_) return;
      }
    } else {
      for (std::size_t t = 0; t < tgt_.count(bd); ++t) {
        attempt(t);
        if (stop_) return;
      }
    }
  }

  Src src_;
  Tgt tgt_;
  CellMap map_;
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> cofaces_;
  std::vector<std::pair<std::size_t, std::size_t>> trail_;
  bool stop_ = false;
};

inline bool is_morphism(const PrecubicalSet& D, const PrecubicalSet& C, const CellMap& m) {
  if (m.size() < D.levels()) return false;
  for (std::size_t n = 0; n < D.levels(); ++n) {
    if (m[n].size() != D.count(n)) return false;
    for (std::size_t c = 0; c < D.count(n); ++c) {
      if (m[n][c] >= C.count(n)) return false;
      for (std::size_t i = 0; i < n; ++i)
        for (Sign s : {Sign::minus, Sign::plus})
          if (C.face(n, m[n][c], i, s) != m[n - 1][D.face(n, c, i, s)]) return false;
    }
  }
  return true;
}

/// Entries equal to npos in partial are free.
using PartialMap = CellMap;

/// All morphisms D -> C extending partial, in lexicographic order of their (dim, id)-ordered images.
inline std::vector<CellMap> find_morphisms(const PrecubicalSet& D, const PrecubicalSet& C, const PartialMap& partial = {},
                                           std::size_t limit = npos) {
  HomSearch<CubicalFaces, CubicalFaces> search(CubicalFaces{D}, CubicalFaces{C});
  for (std::size_t n = 0; n < partial.size() && n < D.levels(); ++n)
    for (std::size_t c = 0; c < partial[n].size(); ++c)
      if (partial[n][c] != npos && !search.preset(n, c, partial[n][c])) return {};
  std::vector<CellMap> out;
  bool sorted_needed = limit == npos;
  search.run([&](const CellMap& m) {
    out.push_back(m);
    return !(limit != npos && out.size() >= limit);
  });
  if (sorted_needed) std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t count_morphisms(const PrecubicalSet& D, const PrecubicalSet& C, const PartialMap& partial = {},
                                   std::size_t cap = npos) {
  HomSearch<CubicalFaces, CubicalFaces> search(CubicalFaces{D}, CubicalFaces{C});
  for (std::size_t n = 0; n < partial.size() && n < D.levels(); ++n)
    for (std::size_t c = 0; c < partial[n].size(); ++c)
      if (partial[n][c] != npos && !search.preset(n, c, partial[n][c])) return 0;
  std::size_t k = 0;
  search.run([&](const CellMap&) { return ++k < cap; });
  return k;
}

/** @brief Number of extensions of h : D -> C along an inclusion D -> E, with some witnesses. */
struct LiftStatus {
  std::size_t count = 0;
  std::vector<CellMap> lifts;
};

inline LiftStatus lift_status(const PrecubicalSet& C, const PrecubicalSet& E, const CellMap& inclusion, const CellMap& h,
                              std::size_t max_witnesses = 2) {
  PartialMap partial(E.levels());
  for (std::size_t n = 0; n < E.levels(); ++n) partial[n].assign(E.count(n), npos);
  for (std::size_t n = 0; n < inclusion.size(); ++n)
    for (std::size_t c = 0; c < inclusion[n].size(); ++c) partial[n][inclusion[n][c]] = h[n][c];
  HomSearch<CubicalFaces, CubicalFaces> search(CubicalFaces{E}, CubicalFaces{C});
  LiftStatus st;
  for (std::size_t n = 0; n < partial.size(); ++n)
    for (std::size_t c = 0; c < partial[n].size(); ++c)
      if (partial[n][c] != npos && !search.preset(n, c, partial[n][c])) return st;
  search.run([&](const CellMap& m) {
    if (st.lifts.size() < max_witnesses) st.lifts.push_back(m);
    ++st.count;
    return true;
  });
  return st;
}

/// Adds one k-cube for every unfilled hollow k-cube, for k = 3..dmax in turn.
inline PrecubicalSet complete(const PrecubicalSet& C, std::size_t dmax) {
  PrecubicalSet cur = C;
  for (std::size_t k = 3; k <= dmax; ++k) {
    WordComplex full = standard_cube_words(k);
    WordComplex hollow = hollow_cube_words(k);
    CellMap incl = word_inclusion(hollow, full);
    auto borders = find_morphisms(hollow.pcs, cur);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> added;
    for (const auto& b : borders) {
      if (lift_status(cur, full.pcs, incl, b, 0).count > 0) continue;
      std::vector<std::size_t> neg, pos;
      CubeWord top(k, '0');
      for (std::size_t i = 0; i < k; ++i) {
        neg.push_back(b[k - 1][hollow.id(word_face(top, i, Sign::minus))]);
        pos.push_back(b[k - 1][hollow.id(word_face(top, i, Sign::plus))]);
      }
      added.emplace_back(neg, pos);
    }
    for (auto& [neg, pos] : added) cur.add_cube(k, neg, pos);
  }
  return cur;
}

}  // namespace dihom
