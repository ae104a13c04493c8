#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "pcs.hpp"

namespace dihom {

/** @brief An edge traversed forwards or backwards. */
struct Step {
  std::size_t edge = 0;
  bool reversed = false;

  Step inverse() const { return {edge, !reversed}; }
  std::uint32_t code() const { return static_cast<std::uint32_t>(edge * 2 + (reversed ? 1 : 0)); }
  static Step from_code(std::uint32_t c) { return {c / 2, (c & 1) != 0}; }

  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

struct PathT {
  std::size_t start = 0;
  std::vector<Step> steps;

  std::size_t length() const { return steps.size(); }
  friend bool operator==(const PathT&, const PathT&) = default;
  friend auto operator<=>(const PathT&, const PathT&) = default;
};

inline std::size_t step_source(const PrecubicalSet& C, Step s) { return s.reversed ? C.target(s.edge) : C.source(s.edge); }
inline std::size_t step_target(const PrecubicalSet& C, Step s) { return s.reversed ? C.source(s.edge) : C.target(s.edge); }

inline std::size_t path_end(const PrecubicalSet& C, const PathT& p) {
  return p.steps.empty() ? p.start : step_target(C, p.steps.back());
}

inline bool is_valid(const PrecubicalSet& C, const PathT& p) {
  if (p.start >= C.vertices()) return false;
  std::size_t v = p.start;
  for (auto s : p.steps) {
    if (s.edge >= C.count(1) || step_source(C, s) != v) return false;
    v = step_target(C, s);
  }
  return true;
}

inline bool is_dipath(const PathT& p) {
  return std::none_of(p.steps.begin(), p.steps.end(), [](Step s) { return s.reversed; });
}

inline PathT reversed(const PrecubicalSet& C, const PathT& p) {
  PathT r{path_end(C, p), {}};
  for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) r.steps.push_back(it->inverse());
  return r;
}

inline PathT concat(const PathT& a, const PathT& b) {
  PathT r = a;
  r.steps.insert(r.steps.end(), b.steps.begin(), b.steps.end());
  return r;
}

/** @brief One rewriting step on a path: a tile move, or insertion/deletion of a step followed by its inverse. */
struct Move {
  enum class Rule { Tile, Insert, Delete };
  Rule rule = Rule::Tile;
  std::size_t position = 0;
  Step first, second;  // tile: the replacing pair; insert: first is the inserted step
};

inline const char* rule_name(Move::Rule r) {
  switch (r) {
    case Move::Rule::Tile: return "tile";
    case Move::Rule::Insert: return "insert";
    case Move::Rule::Delete: return "delete";
  }
  return "";
}

/** @brief The oriented tile relation on pairs of composable steps, closed under symmetry. */
class TileIndex {
 public:
  explicit TileIndex(const PrecubicalSet& C) {
    for (const auto& t : tiles(C)) {
      Step a{t.a, false}, b{t.b, false}, b2{t.b2, false}, a2{t.a2, false};
      add(a, b, b2, a2);
      add(b.inverse(), a.inverse(), a2.inverse(), b2.inverse());
      add(a.inverse(), b2, b, a2.inverse());
      add(b2.inverse(), a, a2, b.inverse());
    }
    for (auto& [k, v] : rel_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  const std::vector<std::pair<Step, Step>>& related(Step x, Step y) const {
    static const std::vector<std::pair<Step, Step>> none;
    auto it = rel_.find(key(x, y));
    return it == rel_.end() ? none : it->second;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto& [k, v] : rel_) n += v.size();
    return n;
  }

  template <class F>
  void for_each(F f) const {
    for (auto& [k, v] : rel_)
      for (auto& [p, q] : v) f(Step::from_code(static_cast<std::uint32_t>(k >> 32)), Step::from_code(static_cast<std::uint32_t>(k)), p, q);
  }

 private:
  static std::uint64_t key(Step x, Step y) { return (std::uint64_t{x.code()} << 32) | y.code(); }

  void add(Step x, Step y, Step p, Step q) {
    rel_[key(x, y)].push_back({p, q});
    rel_[key(p, q)].push_back({x, y});
  }

  std::map<std::uint64_t, std::vector<std::pair<Step, Step>>> rel_;
};

inline PathT apply(const PrecubicalSet& C, const PathT& p, const Move& m) {
  PathT r = p;
  switch (m.rule) {
    case Move::Rule::Tile:
      if (m.position + 1 >= p.steps.size()) throw Error("tile move out of range");
      r.steps[m.position] = m.first;
      r.steps[m.position + 1] = m.second;
      break;
    case Move::Rule::Insert:
      if (m.position > p.steps.size()) throw Error("insertion out of range");
      r.steps.insert(r.steps.begin() + static_cast<std::ptrdiff_t>(m.position), {m.first, m.first.inverse()});
      break;
    case Move::Rule::Delete:
      if (m.position + 1 >= p.steps.size() || p.steps[m.position].inverse() != p.steps[m.position + 1])
        throw Error("deletion of a non-cancelling pair");
      r.steps.erase(r.steps.begin() + static_cast<std::ptrdiff_t>(m.position),
                    r.steps.begin() + static_cast<std::ptrdiff_t>(m.position) + 2);
      break;
  }
  if (!is_valid(C, r)) throw Error("move produced an invalid path");
  return r;
}

/// Checks that each move is a legal one-step rewrite and that the moves lead from s to t.
inline bool replay(const PrecubicalSet& C, const PathT& s, const PathT& t, const std::vector<Move>& moves) {
  TileIndex idx(C);
  PathT cur = s;
  try {
    for (const auto& m : moves) {
      if (m.rule == Move::Rule::Tile) {
        const auto& rel = idx.related(cur.steps.at(m.position), cur.steps.at(m.position + 1));
        if (std::find(rel.begin(), rel.end(), std::make_pair(m.first, m.second)) == rel.end()) return false;
      }
      cur = apply(C, cur, m);
    }
  } catch (const std::exception&) {
    return false;
  }
  return cur == t;
}

template <class F>
void for_each_dihomotopy_move(const TileIndex& idx, const PathT& s, F f) {
  for (std::size_t i = 0; i + 1 < s.steps.size(); ++i)
    for (auto [p, q] : idx.related(s.steps[i], s.steps[i + 1])) f(Move{Move::Rule::Tile, i, p, q});
}

/// Steps leaving a vertex, in (edge, orientation) order.
inline std::vector<std::vector<Step>> outgoing_steps(const PrecubicalSet& C) {
  std::vector<std::vector<Step>> out(C.vertices());
  for (std::size_t e = 0; e < C.count(1); ++e) {
    out[C.source(e)].push_back({e, false});
    out[C.target(e)].push_back({e, true});
  }
  return out;
}

template <class F>
void for_each_homotopy_move(const PrecubicalSet& C, const TileIndex& idx, const std::vector<std::vector<Step>>& out,
                            const PathT& s, std::size_t max_len, F f) {
  for_each_dihomotopy_move(idx, s, f);
  for (std::size_t i = 0; i + 1 < s.steps.size(); ++i)
    if (s.steps[i].inverse() == s.steps[i + 1]) f(Move{Move::Rule::Delete, i, s.steps[i], s.steps[i + 1]});
  if (s.steps.size() + 2 > max_len) return;
  std::size_t v = s.start;
  for (std::size_t i = 0; i <= s.steps.size(); ++i) {
    for (auto st : out[v]) f(Move{Move::Rule::Insert, i, st, st.inverse()});
    if (i < s.steps.size()) v = step_target(C, s.steps[i]);
  }
}

inline std::vector<PathT> dihomotopy_neighbors(const PrecubicalSet& C, const PathT& s) {
  TileIndex idx(C);
  std::vector<PathT> out;
  for_each_dihomotopy_move(idx, s, [&](const Move& m) { out.push_back(apply(C, s, m)); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<PathT> homotopy_neighbors(const PrecubicalSet& C, const PathT& s) {
  TileIndex idx(C);
  auto out_steps = outgoing_steps(C);
  std::vector<PathT> out;
  for_each_homotopy_move(C, idx, out_steps, s, npos, [&](const Move& m) { out.push_back(apply(C, s, m)); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

using Key = std::vector<std::uint32_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : k) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

inline Key key_of(const PathT& p) {
  Key k;
  k.reserve(p.steps.size());
  for (auto s : p.steps) k.push_back(s.code());
  return k;
}

inline PathT path_of(std::size_t start, const Key& k) {
  PathT p{start, {}};
  for (auto c : k) p.steps.push_back(Step::from_code(c));
  return p;
}

inline void check_endpoints(const PrecubicalSet& C, const PathT& s, const PathT& t) {
  if (!is_valid(C, s) || !is_valid(C, t)) throw Error("invalid path");
  if (s.start != t.start || path_end(C, s) != path_end(C, t)) throw EndpointMismatch("paths do not share endpoints");
}

}  // namespace detail

/// Tile moves leading from s to t (shortest), or nothing when they are not dihomotopic.
inline std::optional<std::vector<Move>> dihomotopy_witness(const PrecubicalSet& C, const PathT& s, const PathT& t) {
  detail::check_endpoints(C, s, t);
  if (s.length() != t.length()) return std::nullopt;
  TileIndex idx(C);
  using detail::Key;
  std::unordered_map<Key, std::pair<Key, Move>, detail::KeyHash> parent;
  Key ks = detail::key_of(s), kt = detail::key_of(t);
  parent[ks] = {ks, Move{}};
  std::deque<Key> queue{ks};
  while (!queue.empty() && !parent.count(kt)) {
    Key k = queue.front();
    queue.pop_front();
    PathT p = detail::path_of(s.start, k);
    for_each_dihomotopy_move(idx, p, [&](const Move& m) {
      Key n = k;
      n[m.position] = m.first.code();
      n[m.position + 1] = m.second.code();
      if (parent.emplace(n, std::make_pair(k, m)).second) queue.push_back(n);
    });
  }
  if (!parent.count(kt)) return std::nullopt;
  std::vector<Move> moves;
  for (Key k = kt; k != ks; k = parent[k].first) moves.push_back(parent[k].second);
  std::reverse(moves.begin(), moves.end());
  return moves;
}

inline bool are_dihomotopic(const PrecubicalSet& C, const PathT& s, const PathT& t) {
  return dihomotopy_witness(C, s, t).has_value();
}

/// The whole dihomotopy class of s, sorted.
inline std::vector<PathT> dihomotopy_class(const PrecubicalSet&, const PathT& s, const TileIndex& idx) {
  using detail::Key;
  std::unordered_set<Key, detail::KeyHash> seen{detail::key_of(s)};
  std::deque<Key> queue{detail::key_of(s)};
  std::vector<PathT> out;
  while (!queue.empty()) {
    Key k = queue.front();
    queue.pop_front();
    PathT p = detail::path_of(s.start, k);
    for_each_dihomotopy_move(idx, p, [&](const Move& m) {
      Key n = k;
      n[m.position] = m.first.code();
      n[m.position + 1] = m.second.code();
      if (seen.insert(n).second) queue.push_back(n);
    });
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<PathT> dihomotopy_class(const PrecubicalSet& C, const PathT& s) {
  return dihomotopy_class(C, s, TileIndex(C));
}

/// True when the 1-cycle s - t is not a rational combination of square boundaries; then s and t are not homotopic.
inline bool homology_separates(const PrecubicalSet& C, const PathT& s, const PathT& t) {
  using Q = boost::multiprecision::cpp_rational;
  std::size_t E = C.count(1), S = C.count(2);
  std::vector<Q> z(E, 0);
  for (auto st : s.steps) z[st.edge] += st.reversed ? -1 : 1;
  for (auto st : t.steps) z[st.edge] -= st.reversed ? -1 : 1;
  if (std::all_of(z.begin(), z.end(), [](const Q& q) { return q == 0; })) return false;
  // Columns: boundaries of squares, then z; z is in the span iff appending it does not raise the rank.
  std::vector<std::vector<Q>> rows(E, std::vector<Q>(S + 1, 0));
  for (const auto& tl : tiles(C)) {
    rows[tl.a][tl.square] += 1;
    rows[tl.b][tl.square] += 1;
    rows[tl.b2][tl.square] -= 1;
    rows[tl.a2][tl.square] -= 1;
  }
  for (std::size_t e = 0; e < E; ++e) rows[e][S] = z[e];
  std::size_t r = 0;
  for (std::size_t col = 0; col <= S && r < E; ++col) {
    std::size_t piv = r;
    while (piv < E && rows[piv][col] == 0) ++piv;
    if (piv == E) continue;
    if (col == S) return true;  // z has a pivot of its own
    std::swap(rows[piv], rows[r]);
    for (std::size_t i = 0; i < E; ++i) {
      if (i == r || rows[i][col] == 0) continue;
      Q f = rows[i][col] / rows[r][col];
      for (std::size_t j = col; j <= S; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return false;
}

/** @brief Outcome of the bounded homotopy search. */
struct HomotopyResult {
  enum class Verdict { Yes, No, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::vector<Move> witness;
  std::string reason;
  std::size_t explored = 0;
};

inline const char* verdict_name(HomotopyResult::Verdict v) {
  switch (v) {
    case HomotopyResult::Verdict::Yes: return "yes";
    case HomotopyResult::Verdict::No: return "no";
    case HomotopyResult::Verdict::Unknown: return "unknown";
  }
  return "";
}

inline constexpr std::size_t default_homotopy_budget = 6;
inline constexpr std::size_t default_state_cap = 4000000;

/**
 * @brief Bounded semi-decision of homotopy.
 *
 * Yes comes with a move sequence found by a two-sided breadth-first search over paths of length at most
 * max(|s|, |t|) + budget. No is returned only when the homology class of s - t is nonzero, which is sound for any
 * budget. Everything else is Unknown.
 */
inline HomotopyResult are_homotopic(const PrecubicalSet& C, const PathT& s, const PathT& t,
                                    std::size_t budget = default_homotopy_budget,
                                    std::size_t state_cap = default_state_cap) {
  detail::check_endpoints(C, s, t);
  HomotopyResult res;
  if (s == t) {
    res.verdict = HomotopyResult::Verdict::Yes;
    return res;
  }
  if (homology_separates(C, s, t)) {
    res.verdict = HomotopyResult::Verdict::No;
    res.reason = "s - t is not a boundary";
    return res;
  }
  std::size_t bound = std::max(s.length(), t.length()) + budget;
  TileIndex idx(C);
  auto out_steps = outgoing_steps(C);
  using detail::Key;
  // side 0 grows from s, side 1 from t
  std::unordered_map<Key, Key, detail::KeyHash> parent[2];
  std::vector<Key> frontier[2];
  Key ks = detail::key_of(s), kt = detail::key_of(t);
  parent[0][ks] = ks;
  parent[1][kt] = kt;
  frontier[0].push_back(ks);
  frontier[1].push_back(kt);
  std::optional<Key> meet;
  bool capped = false;
  while (!meet && (!frontier[0].empty() || !frontier[1].empty())) {
    int side = frontier[0].empty() ? 1 : frontier[1].empty() ? 0 : (frontier[0].size() <= frontier[1].size() ? 0 : 1);
    std::vector<Key> next;
    for (const Key& k : frontier[side]) {
      PathT p = detail::path_of(s.start, k);
      for_each_homotopy_move(C, idx, out_steps, p, bound, [&](const Move& m) {
        if (meet) return;
        Key n = detail::key_of(apply(C, p, m));
        if (!parent[side].emplace(n, k).second) return;
        if (parent[1 - side].count(n)) meet = n;
        next.push_back(std::move(n));
      });
      if (meet) break;
      if (parent[0].size() + parent[1].size() > state_cap) {
        capped = true;
        break;
      }
    }
    if (capped) break;
    frontier[side].swap(next);
  }
  res.explored = parent[0].size() + parent[1].size();
  if (!meet) {
    res.reason = capped ? "state cap reached" : "bounded component exhausted";
    return res;
  }
  std::vector<Key> chain;
  for (Key k = *meet;; k = parent[0][k]) {
    chain.push_back(k);
    if (k == ks) break;
  }
  std::reverse(chain.begin(), chain.end());
  for (Key k = *meet; k != kt;) {
    k = parent[1][k];
    chain.push_back(k);
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    PathT a = detail::path_of(s.start, chain[i]);
    Key want = chain[i + 1];
    std::optional<Move> found;
    for_each_homotopy_move(C, idx, out_steps, a, npos, [&](const Move& m) {
      if (!found && detail::key_of(apply(C, a, m)) == want) found = m;
    });
    res.witness.push_back(*found);
  }
  res.verdict = HomotopyResult::Verdict::Yes;
  return res;
}

/// All dipaths from x to y of length at most len_bound, in lexicographic order.
inline std::vector<PathT> dipaths(const PrecubicalSet& C, std::size_t x, std::size_t y, std::size_t len_bound) {
  std::vector<std::vector<std::size_t>> out(C.vertices());
  for (std::size_t e = 0; e < C.count(1); ++e) out[C.source(e)].push_back(e);
  std::vector<PathT> res;
  PathT cur{x, {}};
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == y) res.push_back(cur);
    if (cur.steps.size() == len_bound) return;
    for (auto e : out[v]) {
      cur.steps.push_back({e, false});
      self(self, C.target(e));
      cur.steps.pop_back();
    }
  };
  rec(rec, x);
  std::sort(res.begin(), res.end(), [](const PathT& a, const PathT& b) { return a.steps < b.steps; });
  return res;
}

/// Dipaths from x to y of length at most len_bound partitioned into dihomotopy classes, ordered by least member.
inline std::vector<std::vector<PathT>> dihomotopy_classes(const PrecubicalSet& C, std::size_t x, std::size_t y,
                                                          std::size_t len_bound) {
  TileIndex idx(C);
  std::vector<std::vector<PathT>> classes;
  std::set<PathT> assigned;
  for (const auto& p : dipaths(C, x, y, len_bound)) {
    if (assigned.count(p)) continue;
    auto cls = dihomotopy_class(C, p, idx);
    for (const auto& q : cls) {
      if (!is_dipath(q)) throw Error("dihomotopy class of a dipath contains a non-dipath");
      assigned.insert(q);
    }
    std::sort(cls.begin(), cls.end(), [](const PathT& a, const PathT& b) { return a.steps < b.steps; });
    classes.push_back(std::move(cls));
  }
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front().steps < b.front().steps; });
  return classes;
}

inline bool has_cancelling_pair(const PathT& p) {
  for (std::size_t i = 0; i + 1 < p.steps.size(); ++i)
    if (p.steps[i].inverse() == p.steps[i + 1]) return true;
  return false;
}

inline bool is_locally_geodesic(const PrecubicalSet& C, const PathT& s) {
  for (const auto& p : dihomotopy_class(C, s))
    if (has_cancelling_pair(p)) return false;
  return true;
}

/// All paths (any orientation) from x to y with length below len.
inline std::vector<PathT> paths_shorter_than(const PrecubicalSet& C, std::size_t x, std::size_t y, std::size_t len) {
  auto out = outgoing_steps(C);
  std::vector<PathT> res;
  PathT cur{x, {}};
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == y) res.push_back(cur);
    if (cur.steps.size() + 1 >= len) return;
    for (auto st : out[v]) {
      cur.steps.push_back(st);
      self(self, step_target(C, st));
      cur.steps.pop_back();
    }
  };
  if (len > 0) rec(rec, x);
  return res;
}

inline HomotopyResult::Verdict is_geodesic(const PrecubicalSet& C, const PathT& s,
                                           std::size_t budget = default_homotopy_budget) {
  bool unknown = false;
  for (const auto& t : paths_shorter_than(C, s.start, path_end(C, s), s.length())) {
    auto r = are_homotopic(C, s, t, budget);
    if (r.verdict == HomotopyResult::Verdict::Yes) return HomotopyResult::Verdict::No;
    if (r.verdict == HomotopyResult::Verdict::Unknown) unknown = true;
  }
  return unknown ? HomotopyResult::Verdict::Unknown : HomotopyResult::Verdict::Yes;
}

inline std::string to_text(const PrecubicalSet& C, const PathT& p) {
  std::ostringstream os;
  os << p.start;
  for (auto st : p.steps) {
    if (st.reversed) os << " <-e" << st.edge << "- ";
    else os << " -e" << st.edge << "-> ";
    os << step_target(C, st);
  }
  return os.str();
}

/// Reads "x0 -e1-> x1 <-e2- x2"; vertex ids are checked against the complex.
inline PathT path_from_text(const PrecubicalSet& C, const std::string& text) {
  std::istringstream is(text);
  PathT p;
  std::string tok;
  if (!(is >> tok)) throw Error("empty path");
  try {
    p.start = std::stoul(tok);
    while (is >> tok) {
      Step st;
      if (tok.rfind("-e", 0) == 0 && tok.size() > 4 && tok.substr(tok.size() - 2) == "->") {
        st = {std::stoul(tok.substr(2, tok.size() - 4)), false};
      } else if (tok.rfind("<-e", 0) == 0 && tok.size() > 4 && tok.back() == '-') {
        st = {std::stoul(tok.substr(3, tok.size() - 4)), true};
      } else {
        throw Error("bad step token '" + tok + "'");
      }
      std::string v;
      if (!(is >> v)) throw Error("path ends with a dangling step");
      p.steps.push_back(st);
      if (st.edge >= C.count(1) || step_target(C, st) != std::stoul(v)) throw Error("step does not reach vertex " + v);
    }
  } catch (const std::invalid_argument&) {
    throw Error("malformed path '" + text + "'");
  }
  if (!is_valid(C, p)) throw Error("path does not compose: '" + text + "'");
  return p;
}

inline nlohmann::json to_json(const PathT& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (auto st : p.steps) steps.push_back({{"edge", st.edge}, {"reversed", st.reversed}});
  return {{"start", p.start}, {"steps", steps}};
}

inline PathT path_from_json(const nlohmann::json& j) {
  PathT p;
  p.start = j.at("start").get<std::size_t>();
  for (const auto& s : j.at("steps")) p.steps.push_back({s.at("edge").get<std::size_t>(), s.at("reversed").get<bool>()});
  return p;
}

inline nlohmann::json to_json(const std::vector<Move>& moves) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : moves) {
    nlohmann::json j{{"rule", rule_name(m.rule)}, {"position", m.position}};
    auto step = [](Step st) { return nlohmann::json{{"edge", st.edge}, {"reversed", st.reversed}}; };
    if (m.rule == Move::Rule::Insert) j["step"] = step(m.first);
    if (m.rule == Move::Rule::Tile) j["with"] = {step(m.first), step(m.second)};
    out.push_back(j);
  }
  return out;
}

inline std::vector<Move> moves_from_json(const nlohmann::json& j) {
  auto step = [](const nlohmann::json& s) { return Step{s.at("edge").get<std::size_t>(), s.at("reversed").get<bool>()}; };
  std::vector<Move> out;
  for (const auto& m : j) {
    Move mv;
    mv.position = m.at("position").get<std::size_t>();
    auto rule = m.at("rule").get<std::string>();
    if (rule == "tile") {
      mv.rule = Move::Rule::Tile;
      mv.first = step(m.at("with").at(0));
      mv.second = step(m.at("with").at(1));
    } else if (rule == "insert") {
      mv.rule = Move::Rule::Insert;
      mv.first = step(m.at("step"));
    } else if (rule == "delete") {
      mv.rule = Move::Rule::Delete;
    } else {
      throw Error("unknown move rule '" + rule + "'");
    }
    out.push_back(mv);
  }
  return out;
}

}  // namespace dihom
