#pragma once

// Shared test helpers: hand-built complexes and a random program generator.

#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <dihom/lang.hpp>
#include <dihom/paths.hpp>
#include <dihom/pcs.hpp>

namespace dihom::fixtures {

struct Fixture {
  std::string name;
  PrecubicalSet pcs;
};

inline PrecubicalSet boundary_cube() { return hollow_cube(3); }

/// Boundary of the 3-cube without the face 0-0.
inline WordComplex cube_without_bottom_words() {
  return cube_subcomplex(3, [](const CubeWord& w) { return zeros_in(w) < 3 && w != "0-0"; });
}

inline PrecubicalSet cube_without_bottom() { return cube_without_bottom_words().pcs; }

/// Two squares sharing the corners -+ and +- but no edge.
inline PrecubicalSet pinned_squares() {
  auto co = coproduct(standard_cube(2), standard_cube(2));
  // vertex order of the standard square: --, -+, +-, ++
  return glue_vertices(co.pcs, {{1, 5}, {2, 6}}).pcs;
}

/// Vertices x, y; edge a : x -> y; loops b at x and b' at y; one square with d0- = b, d0+ = b', d1- = d1+ = a.
inline PrecubicalSet cylinder() {
  PrecubicalSet C;
  std::size_t x = C.add_vertex(), y = C.add_vertex();
  std::size_t a = C.add_edge(x, y);
  std::size_t b = C.add_edge(x, x);
  std::size_t b2 = C.add_edge(y, y);
  C.add_cube(2, {b, a}, {b2, a});
  return C;
}

/// The four small graphs: parallel edges, loop, two-cycle, directed triangle.
inline PrecubicalSet graph_parallel() {
  PrecubicalSet C;
  C.add_vertex();
  C.add_vertex();
  C.add_edge(0, 1);
  C.add_edge(0, 1);
  return C;
}

inline PrecubicalSet graph_loop() {
  PrecubicalSet C;
  C.add_vertex();
  C.add_edge(0, 0);
  return C;
}

inline PrecubicalSet graph_two_cycle() {
  PrecubicalSet C;
  C.add_vertex();
  C.add_vertex();
  C.add_edge(0, 1);
  C.add_edge(1, 0);
  return C;
}

inline PrecubicalSet graph_triangle() {
  PrecubicalSet C;
  for (int i = 0; i < 3; ++i) C.add_vertex();
  C.add_edge(0, 1);
  C.add_edge(1, 2);
  C.add_edge(2, 0);
  return C;
}

/// Vertex x with edges a, b, c leaving it; b and c span one square.
inline PrecubicalSet link_example() {
  PrecubicalSet C;
  std::size_t x = C.add_vertex(), y1 = C.add_vertex(), y2 = C.add_vertex(), y3 = C.add_vertex();
  std::size_t z = C.add_vertex(), z2 = C.add_vertex();
  C.add_edge(x, y3);                   // a
  std::size_t b = C.add_edge(x, y1);  // b
  std::size_t c = C.add_edge(x, y2);  // c
  C.add_edge(y1, z2);
  std::size_t bz = C.add_edge(y1, z);
  std::size_t cz = C.add_edge(y2, z);
  C.add_edge(y3, z2);
  C.add_cube(2, {b, c}, {cz, bz});
  return C;
}

/// A path given by its start word and edge words; a leading '~' reverses an edge.
inline PathT word_path(const WordComplex& wc, const std::string& start, const std::vector<std::string>& edges) {
  PathT p{wc.id(start), {}};
  for (const auto& w : edges) {
    bool rev = w[0] == '~';
    p.steps.push_back({wc.id(rev ? w.substr(1) : w), rev});
  }
  if (!is_valid(wc.pcs, p)) throw Error("word path does not compose");
  return p;
}

// Independent partition oracle: pairwise breadth-first search, then union-find.
inline std::size_t naive_class_count(const PrecubicalSet& C, const std::vector<PathT>& ps) {
  std::vector<std::size_t> parent(ps.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (find(i) != find(j) && ps[i].length() == ps[j].length()) {
        std::set<PathT> seen{ps[i]};
        std::vector<PathT> todo{ps[i]};
        bool hit = false;
        while (!todo.empty() && !hit) {
          PathT p = todo.back();
          todo.pop_back();
          for (auto& q : dihomotopy_neighbors(C, p)) {
            if (q == ps[j]) hit = true;
            if (seen.insert(q).second) todo.push_back(q);
          }
        }
        if (hit) parent[find(j)] = find(i);
      }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < ps.size(); ++i) roots.insert(find(i));
  return roots.size();
}

struct SynthesizedHomotopy {
  PathT source, target;
  std::vector<Move> moves;
};

/** @brief A homotopy between dipaths: tile moves mixed with detours that are inserted, moved around and cancelled. */
inline SynthesizedHomotopy synthesize_homotopy(const PrecubicalSet& C, const PathT& s, std::mt19937& rng,
                                               std::size_t detours = 3, std::size_t shuffles = 4) {
  TileIndex idx(C);
  auto out = outgoing_steps(C);
  SynthesizedHomotopy h{s, s, {}};
  std::vector<PathT> trail{s};
  auto pick = [&](const std::vector<Move>& ms) { return ms[std::uniform_int_distribution<std::size_t>(0, ms.size() - 1)(rng)]; };
  auto step = [&](const Move& m) {
    h.moves.push_back(m);
    trail.push_back(apply(C, trail.back(), m));
  };
  auto tiles_only = [&](std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<Move> ms;
      for_each_dihomotopy_move(idx, trail.back(), [&](const Move& m) { ms.push_back(m); });
      if (!ms.empty()) step(pick(ms));
    }
  };
  tiles_only(shuffles);
  std::size_t mark = h.moves.size();
  for (std::size_t d = 0; d < detours; ++d) {
    std::vector<Move> ins;
    for_each_homotopy_move(C, idx, out, trail.back(), npos, [&](const Move& m) {
      if (m.rule == Move::Rule::Insert) ins.push_back(m);
    });
    if (ins.empty()) break;
    step(pick(ins));
    tiles_only(shuffles);
  }
  for (bool again = true; again;) {
    again = false;
    const auto& p = trail.back().steps;
    for (std::size_t i = 0; i + 1 < p.size() && !again; ++i)
      if (p[i].inverse() == p[i + 1]) {
        step({Move::Rule::Delete, i, p[i], p[i + 1]});
        again = true;
      }
  }
  if (!is_dipath(trail.back())) {
    // walk back to the last dipath, undoing every move since
    for (std::size_t k = h.moves.size(); k > mark; --k) {
      const Move& m = h.moves[k - 1];
      const PathT& before = trail[k - 1];
      switch (m.rule) {
        case Move::Rule::Tile:
          step({Move::Rule::Tile, m.position, before.steps[m.position], before.steps[m.position + 1]});
          break;
        case Move::Rule::Insert: step({Move::Rule::Delete, m.position, m.first, m.first.inverse()}); break;
        case Move::Rule::Delete: step({Move::Rule::Insert, m.position, m.first, m.first.inverse()}); break;
      }
    }
    tiles_only(shuffles);
  }
  h.target = trail.back();
  return h;
}

inline std::vector<Fixture> fixture_corpus() {
  std::vector<Fixture> out;
  for (std::size_t n = 0; n <= 4; ++n) out.push_back({"Y" + std::to_string(n), standard_cube(n)});
  out.push_back({"boundary-cube", boundary_cube()});
  out.push_back({"cube-without-bottom", cube_without_bottom()});
  out.push_back({"pinned-squares", pinned_squares()});
  out.push_back({"cylinder", cylinder()});
  out.push_back({"graph-parallel", graph_parallel()});
  out.push_back({"graph-loop", graph_loop()});
  out.push_back({"graph-two-cycle", graph_two_cycle()});
  out.push_back({"graph-triangle", graph_triangle()});
  return out;
}

/** @brief Random conservative programs: balanced critical sections, choices and loops per thread. */
class ProgramGenerator {
 public:
  explicit ProgramGenerator(unsigned seed) : rng_(seed) {}

  Program program(std::size_t max_threads = 3, std::size_t depth = 4) {
    std::size_t threads = pick(1, max_threads);
    mutexes_ = pick(1, 3);
    Program p = thread(depth);
    for (std::size_t t = 1; t < threads; ++t) p = Program::node(Program::Kind::Par, std::move(p), thread(depth));
    return p;
  }

  // Height of the thread AST stays within depth.
  Program thread(std::size_t depth) { return block(depth); }

 private:
  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

  Program action() { return Program::leaf(Program::Kind::Action, std::string(1, char('A' + pick(0, 3)))); }

  std::string mutex() { return std::string(1, char('a' + pick(0, mutexes_ - 1))); }

  // Balanced block (delta 0) whose AST height is at most depth.
  Program block(std::size_t depth) {
    using K = Program::Kind;
    if (depth <= 1) return action();
    switch (pick(0, depth >= 3 ? 4 : 2)) {
      case 0: return action();
      case 1: return Program::node(K::Seq, block(depth - 1), block(depth - 1));
      case 2: {
        // P(m); body; V(m) has height 2 + height(body)
        std::string m = mutex();
        Program body = depth >= 3 ? block(depth - 2) : action();
        if (depth < 3) {
          return Program::node(K::Seq, Program::leaf(K::P, m), Program::leaf(K::V, m));
        }
        return Program::node(K::Seq, Program::node(K::Seq, Program::leaf(K::P, m), std::move(body)), Program::leaf(K::V, m));
      }
      case 3: return Program::node(K::Or, block(depth - 1), block(depth - 1));
      default:
        // loop bodies are sequences so that the loop cycle has length at least three
        return Program::node(K::Star, Program::node(K::Seq, block(depth - 2), block(depth - 2)));
    }
  }

  std::mt19937 rng_;
  std::size_t mutexes_ = 1;
};

inline std::size_t height(const Program& p) {
  std::size_t h = 0;
  for (const auto& k : p.kids) h = std::max(h, height(k));
  return h + 1;
}

}  // namespace dihom::fixtures
