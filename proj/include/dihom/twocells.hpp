#pragma once

// Formal 2-cells between paths, canonical forms, and extraction of dihomotopies from homotopies.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "npc.hpp"
#include "paths.hpp"
#include "pcs.hpp"

namespace dihom {

/** @brief A generating 2-cell: a crossing a.b => b2.a2, a cap () => a.~a, or a cup ~a.a => (). */
struct Generator {
  enum class Kind { Gamma, Eta, Eps };
  Kind kind = Kind::Gamma;
  Step a, b, b2, a2;

  static Generator gamma(Step a, Step b, Step b2, Step a2) { return {Kind::Gamma, a, b, b2, a2}; }
  static Generator eta(Step a) { return {Kind::Eta, a, {}, {}, {}}; }
  static Generator eps(Step a) { return {Kind::Eps, a, {}, {}, {}}; }

  std::vector<Step> source() const {
    switch (kind) {
      case Kind::Gamma: return {a, b};
      case Kind::Eta: return {};
      case Kind::Eps: return {a.inverse(), a};
    }
    return {};
  }
  std::vector<Step> target() const {
    switch (kind) {
      case Kind::Gamma: return {b2, a2};
      case Kind::Eta: return {a, a.inverse()};
      case Kind::Eps: return {};
    }
    return {};
  }

  friend bool operator==(const Generator& x, const Generator& y) {
    if (x.kind != y.kind || x.a != y.a) return false;
    return x.kind != Kind::Gamma || (x.b == y.b && x.b2 == y.b2 && x.a2 == y.a2);
  }
};

struct Slice {
  PathT left;
  Generator gen;
  PathT right;

  std::size_t position() const { return left.length(); }
  friend bool operator==(const Slice&, const Slice&) = default;
};

struct FormalTwoCell {
  PathT source, target;
  std::vector<Slice> slices;

  std::size_t length() const { return slices.size(); }
  friend bool operator==(const FormalTwoCell&, const FormalTwoCell&) = default;
};

inline std::size_t cell_length(const FormalTwoCell& phi) { return phi.length(); }

namespace detail {

inline std::vector<Step> splice(const std::vector<Step>& v, std::size_t pos, const Generator& g) {
  auto src = g.source();
  if (pos + src.size() > v.size() || !std::equal(src.begin(), src.end(), v.begin() + static_cast<std::ptrdiff_t>(pos)))
    throw Error("generator does not match the path at position " + std::to_string(pos));
  std::vector<Step> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(pos));
  for (auto s : g.target()) out.push_back(s);
  out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(pos + src.size()), v.end());
  return out;
}

inline std::vector<Step> slice_of(const std::vector<Step>& v, std::size_t from, std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

inline std::vector<Step> cat(std::vector<Step> x, const std::vector<Step>& y) {
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

}  // namespace detail

/// Builds a cell by applying generators at given positions, starting from an identity.
class CellBuilder {
 public:
  CellBuilder(const PrecubicalSet& C, PathT source) : C_(C) {
    cell_.source = source;
    cell_.target = std::move(source);
  }

  CellBuilder& apply(std::size_t pos, const Generator& g) {
    auto& cur = cell_.target;
    if (pos > cur.steps.size()) throw Error("slice position out of range");
    Slice s;
    s.left = {cur.start, detail::slice_of(cur.steps, 0, pos)};
    s.gen = g;
    std::size_t after = pos + g.source().size();
    if (after > cur.steps.size()) throw Error("generator does not fit in the path");
    std::size_t mid = path_end(C_, s.left);
    for (auto st : g.target()) mid = step_target(C_, st);
    if (g.kind == Generator::Kind::Eps) mid = step_target(C_, g.a);
    s.right = {mid, detail::slice_of(cur.steps, after, cur.steps.size())};
    cur.steps = detail::splice(cur.steps, pos, g);
    cell_.slices.push_back(std::move(s));
    return *this;
  }

  const PathT& current() const { return cell_.target; }
  FormalTwoCell cell() const { return cell_; }

 private:
  const PrecubicalSet& C_;
  FormalTwoCell cell_;
};

inline FormalTwoCell identity_cell(const PathT& f) { return {f, f, {}}; }

/// Turns a replayable sequence of homotopy moves into the corresponding slices.
inline FormalTwoCell cell_from_moves(const PrecubicalSet& C, const PathT& s, const std::vector<Move>& moves) {
  CellBuilder b(C, s);
  for (const auto& m : moves) {
    const auto& cur = b.current().steps;
    switch (m.rule) {
      case Move::Rule::Tile:
        b.apply(m.position, Generator::gamma(cur.at(m.position), cur.at(m.position + 1), m.first, m.second));
        break;
      case Move::Rule::Insert: b.apply(m.position, Generator::eta(m.first)); break;
      case Move::Rule::Delete: b.apply(m.position, Generator::eps(cur.at(m.position + 1))); break;
    }
  }
  return b.cell();
}

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

inline ValidationReport validate_cell(const PrecubicalSet& C, const FormalTwoCell& phi) {
  ValidationReport r;
  auto bad = [&](std::size_t i, const std::string& what) {
    r.problems.push_back("slice " + std::to_string(i) + ": " + what);
  };
  if (!is_valid(C, phi.source)) r.problems.push_back("source is not a path");
  if (!is_valid(C, phi.target)) r.problems.push_back("target is not a path");
  if (!r.ok()) return r;
  TileIndex idx(C);
  PathT cur = phi.source;
  for (std::size_t i = 0; i < phi.slices.size(); ++i) {
    const auto& s = phi.slices[i];
    const auto& g = s.gen;
    auto steps_ok = [&](Step st) { return st.edge < C.count(1); };
    bool gen_ok = steps_ok(g.a) && (g.kind != Generator::Kind::Gamma || (steps_ok(g.b) && steps_ok(g.b2) && steps_ok(g.a2)));
    if (!gen_ok) {
      bad(i, "generator names an unknown edge");
      return r;
    }
    if (g.kind == Generator::Kind::Gamma) {
      const auto& rel = idx.related(g.a, g.b);
      if (std::find(rel.begin(), rel.end(), std::make_pair(g.b2, g.a2)) == rel.end())
        bad(i, "no tile e" + std::to_string(g.a.edge) + (g.a.reversed ? "~" : "") + " . e" + std::to_string(g.b.edge) +
                   (g.b.reversed ? "~" : "") + " relating it to the claimed target");
    }
    if (g.kind == Generator::Kind::Eta && step_source(C, g.a) != path_end(C, s.left)) bad(i, "cap is not based at its position");
    PathT before{s.left.start, detail::cat(detail::cat(s.left.steps, g.source()), s.right.steps)};
    if (s.left.start != phi.source.start) bad(i, "left context does not start at the source vertex");
    if (before != cur) {
      bad(i, "source of the slice differs from the target of the previous one");
      return r;
    }
    cur = {s.left.start, detail::cat(detail::cat(s.left.steps, g.target()), s.right.steps)};
    if (!is_valid(C, cur)) {
      bad(i, "target of the slice is not a path");
      return r;
    }
  }
  if (cur != phi.target) r.problems.push_back("composite does not end at the declared target");
  return r;
}

namespace detail {

using Chain = std::vector<std::pair<Step, Step>>;  // per crossing: (crossed step after the crossing, strand after)

// Depth-first search for a strand c crossing f left to right, honouring optional constraints.
inline bool chain_search(const TileIndex& idx, Step c, const std::vector<Step>& f, std::size_t i,
                         const std::vector<std::optional<Step>>& want, std::optional<Step> want_end, Chain& acc,
                         std::size_t* deepest = nullptr) {
  if (deepest) *deepest = std::max(*deepest, i);
  if (i == f.size()) return !want_end || *want_end == c;
  for (auto [x, y] : idx.related(c, f[i])) {
    if (i < want.size() && want[i] && *want[i] != x) continue;
    acc.push_back({x, y});
    if (chain_search(idx, y, f, i + 1, want, want_end, acc, deepest)) return true;
    acc.pop_back();
  }
  return false;
}

inline std::optional<Chain> find_chain(const TileIndex& idx, Step c, const std::vector<Step>& f,
                                       const std::vector<std::optional<Step>>& want = {},
                                       std::optional<Step> want_end = std::nullopt) {
  Chain acc;
  if (chain_search(idx, c, f, 0, want, want_end, acc)) return acc;
  return std::nullopt;
}

inline std::vector<Step> outputs(const Chain& ch) {
  std::vector<Step> out;
  for (auto& [x, y] : ch) out.push_back(x);
  return out;
}

}  // namespace detail

/// The composite crossing of a past every step of f, built one tile at a time.
inline FormalTwoCell gamma_general(const PrecubicalSet& C, Step a, const PathT& f) {
  TileIndex idx(C);
  std::size_t deepest = 0;
  detail::Chain ch;
  if (!detail::chain_search(idx, a, f.steps, 0, {}, std::nullopt, ch, &deepest)) {
    throw NotDefined("no tile closes the crossing at step " + std::to_string(deepest) + " of the path");
  }
  PathT src{step_source(C, a), detail::cat({a}, f.steps)};
  if (!is_valid(C, src)) throw NotDefined("the strand and the path do not compose");
  CellBuilder b(C, src);
  Step c = a;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    b.apply(i, Generator::gamma(c, f.steps[i], ch[i].first, ch[i].second));
    c = ch[i].second;
  }
  return b.cell();
}

/** @brief One operator of a canonical form.
 *
 * G: the strand a enters on the left of the source and crosses f, leaving g alone.
 * H: a cap a.~a is inserted after f, and its right leg crosses g; h is left alone.
 * E: the source gains ~a on the left, which cancels against the first target step a of the inner cell.
 * An I operator is a G with empty f.
 */
struct Operator {
  enum class Kind { G, H, E };
  Kind kind = Kind::G;
  Step a;
  std::vector<Step> f, g, h;
  detail::Chain chain;

  bool is_identity() const { return kind == Kind::G && f.empty(); }

  Step strand_end() const {
    Step start = kind == Kind::H ? a.inverse() : a;
    return chain.empty() ? start : chain.back().second;
  }

  /// What the inner cell must produce.
  std::vector<Step> inner_target() const {
    switch (kind) {
      case Kind::G: return detail::cat(f, g);
      case Kind::H: return detail::cat(detail::cat(f, g), h);
      case Kind::E: return detail::cat({a}, f);
    }
    return {};
  }

  std::vector<Step> target() const {
    switch (kind) {
      case Kind::G: return detail::cat(detail::cat(detail::outputs(chain), {strand_end()}), g);
      case Kind::H: {
        auto t = detail::cat(f, {a});
        t = detail::cat(t, detail::outputs(chain));
        t.push_back(strand_end());
        return detail::cat(t, h);
      }
      case Kind::E: return f;
    }
    return {};
  }

  friend bool operator==(const Operator&, const Operator&) = default;
};

inline Operator op_g(Step a, std::vector<Step> f, std::vector<Step> g, detail::Chain ch) {
  return {Operator::Kind::G, a, std::move(f), std::move(g), {}, std::move(ch)};
}
inline Operator op_h(std::vector<Step> f, Step a, std::vector<Step> g, std::vector<Step> h, detail::Chain ch) {
  return {Operator::Kind::H, a, std::move(f), std::move(g), std::move(h), std::move(ch)};
}
inline Operator op_e(Step a, std::vector<Step> f) { return {Operator::Kind::E, a, std::move(f), {}, {}, {}}; }

/** @brief Operators listed outermost first, applied to the empty cell at vertex base. */
struct CanonicalForm {
  std::size_t base = 0;
  std::vector<Operator> ops;

  std::size_t count(Operator::Kind k) const {
    return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [&](const Operator& o) { return o.kind == k; }));
  }
  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

inline PathT cf_source(const PrecubicalSet& C, const CanonicalForm& cf) {
  std::vector<Step> s;
  for (const auto& o : cf.ops) {
    if (o.kind == Operator::Kind::G) s.push_back(o.a);
    if (o.kind == Operator::Kind::E) s.push_back(o.a.inverse());
  }
  return {s.empty() ? cf.base : step_source(C, s.front()), s};
}

inline PathT cf_target(const PrecubicalSet& C, const CanonicalForm& cf) {
  return {cf_source(C, cf).start, cf.ops.empty() ? std::vector<Step>{} : cf.ops.front().target()};
}

/// The slices a canonical form stands for, innermost operator first.
inline FormalTwoCell expand(const PrecubicalSet& C, const CanonicalForm& cf) {
  // positions relative to the current source; prepending a source step shifts everything right
  std::vector<std::pair<std::size_t, Generator>> gens;
  for (auto it = cf.ops.rbegin(); it != cf.ops.rend(); ++it) {
    const auto& o = *it;
    switch (o.kind) {
      case Operator::Kind::G: {
        for (auto& [p, g] : gens) ++p;
        Step c = o.a;
        for (std::size_t i = 0; i < o.chain.size(); ++i) {
          gens.push_back({i, Generator::gamma(c, o.f[i], o.chain[i].first, o.chain[i].second)});
          c = o.chain[i].second;
        }
        break;
      }
      case Operator::Kind::H: {
        gens.push_back({o.f.size(), Generator::eta(o.a)});
        Step d = o.a.inverse();
        for (std::size_t i = 0; i < o.chain.size(); ++i) {
          gens.push_back({o.f.size() + 1 + i, Generator::gamma(d, o.g[i], o.chain[i].first, o.chain[i].second)});
          d = o.chain[i].second;
        }
        break;
      }
      case Operator::Kind::E:
        for (auto& [p, g] : gens) ++p;
        gens.push_back({0, Generator::eps(o.a)});
        break;
    }
  }
  CellBuilder b(C, cf_source(C, cf));
  for (const auto& [p, g] : gens) b.apply(p, g);
  return b.cell();
}

/// Checks that each operator's inner target matches the next operator's output.
inline bool well_typed(const PrecubicalSet& C, const CanonicalForm& cf) {
  for (std::size_t k = 0; k < cf.ops.size(); ++k) {
    const auto& o = cf.ops[k];
    auto inner = k + 1 < cf.ops.size() ? cf.ops[k + 1].target() : std::vector<Step>{};
    if (o.inner_target() != inner) return false;
    if ((o.kind == Operator::Kind::G && o.chain.size() != o.f.size()) ||
        (o.kind == Operator::Kind::H && o.chain.size() != o.g.size()))
      return false;
  }
  try {
    return validate_cell(C, expand(C, cf)).ok();
  } catch (const Error&) {
    return false;
  }
}

/** @brief Pushes slices into canonical forms; each case is one groupoid relation applied in context. */
class Rewriter {
 public:
  using Ops = std::vector<Operator>;

  explicit Rewriter(const PrecubicalSet& C) : C_(C), idx_(C) {}

  const TileIndex& index() const { return idx_; }
  const std::vector<std::string>& trace() const { return trace_; }

  CanonicalForm identity(const PathT& f) const {
    CanonicalForm cf{path_end(C_, f), {}};
    for (auto s : f.steps) cf.ops.push_back(op_g(s, {}, {}, {}));
    // inner targets: each I passes the rest of f through
    for (std::size_t k = 0; k < cf.ops.size(); ++k) cf.ops[k].g = detail::slice_of(f.steps, k + 1, f.steps.size());
    return cf;
  }

  /// The canonical form of (slice at pos) after cf.
  CanonicalForm add(const CanonicalForm& cf, std::size_t pos, const Generator& gen) {
    auto expected = detail::splice(cf.ops.empty() ? std::vector<Step>{} : cf.ops.front().target(), pos, gen);
    CanonicalForm out{cf.base, {}};
    if (gen.kind == Generator::Kind::Eta) {
      auto t = cf.ops.empty() ? std::vector<Step>{} : cf.ops.front().target();
      note("cap");
      out.ops = cf.ops;
      out.ops.insert(out.ops.begin(), op_h(detail::slice_of(t, 0, pos), gen.a, {}, detail::slice_of(t, pos, t.size()), {}));
    } else {
      out.ops = push(cf.ops, pos, gen);
    }
    auto got = out.ops.empty() ? std::vector<Step>{} : out.ops.front().target();
    if (got != expected) throw std::logic_error("rewriting changed the target of the cell");
    return out;
  }

  Ops push(const Ops& ops, std::size_t p, const Generator& s) {
    if (ops.empty()) throw std::logic_error("slice applied to an empty target");
    const Operator& o = ops.front();
    Ops inner(ops.begin() + 1, ops.end());
    switch (o.kind) {
      case Operator::Kind::E: {
        note("exchange");
        Operator n = o;
        n.f = detail::splice(o.f, p, s);
        return cons(n, push(inner, p + 1, s));
      }
      case Operator::Kind::G: return push_g(o, inner, p, s);
      case Operator::Kind::H: return push_h(o, inner, p, s);
    }
    return ops;
  }

 private:
  static Ops cons(Operator o, Ops rest) {
    rest.insert(rest.begin(), std::move(o));
    return rest;
  }

  void note(const char* rule) { trace_.emplace_back(rule); }

  [[noreturn]] void stuck(const std::string& what) const {
    throw HypothesisViolated("no rewriting applies: " + what);
  }

  Ops push_all(Ops ops, const std::vector<std::pair<std::size_t, Generator>>& gens) {
    for (const auto& [p, g] : gens) ops = push(ops, p, g);
    return ops;
  }

  // Strand c crossing x then y, re-expressed after the pair x.y is itself replaced: the cube relation.
  std::optional<std::tuple<Step, Step, detail::Chain>> yang_baxter(Step c, Step x, Step y, Step out_x, Step out_y, Step end) {
    for (auto [u, v] : idx_.related(x, y)) {
      auto ch = detail::find_chain(idx_, c, {u, v}, {out_x, out_y}, end);
      if (ch) return std::make_tuple(u, v, *ch);
    }
    return std::nullopt;
  }

  Ops push_g(const Operator& o, const Ops& inner, std::size_t p, const Generator& s) {
    const std::size_t n = o.f.size();
    const bool eps = s.kind == Generator::Kind::Eps;
    auto strand_before = [&](std::size_t i) { return i == 0 ? o.a : o.chain[i - 1].second; };
    if (p >= n + 1) {
      note("exchange");
      Operator m = o;
      m.g = detail::splice(o.g, p - n - 1, s);
      return cons(m, push(inner, p - 1, s));
    }
    if (p + 1 < n) {
      Step c = strand_before(p);
      Operator m = o;
      if (!eps) {
        auto yb = yang_baxter(c, o.f[p], o.f[p + 1], s.b2, s.a2, o.chain[p + 1].second);
        if (!yb) stuck("three strands admit no commuting cube");
        note("yang-baxter");
        auto [u, v, ch] = *yb;
        m.f[p] = u;
        m.f[p + 1] = v;
        m.chain[p] = ch[0];
        m.chain[p + 1] = ch[1];
        return cons(m, push(inner, p, Generator::gamma(o.f[p], o.f[p + 1], u, v)));
      }
      if (o.f[p + 1] != o.f[p].inverse() || o.chain[p + 1].second != c) stuck("strand crossing a cancelling pair");
      note("crossing-cancel");
      m.f.erase(m.f.begin() + static_cast<std::ptrdiff_t>(p), m.f.begin() + static_cast<std::ptrdiff_t>(p + 2));
      m.chain.erase(m.chain.begin() + static_cast<std::ptrdiff_t>(p), m.chain.begin() + static_cast<std::ptrdiff_t>(p + 2));
      return cons(m, push(inner, p, Generator::eps(o.f[p + 1])));
    }
    if (p + 1 == n) {
      // the slice touches the last crossing and the strand
      Step c = strand_before(n - 1), x = o.f[n - 1];
      Operator m = o;
      m.f.pop_back();
      m.chain.pop_back();
      m.g.insert(m.g.begin(), x);
      if (!eps) {
        if (s.b2 != c || s.a2 != x) stuck("crossing undone by a different tile");
        note("inverse");
        return cons(m, inner);
      }
      if (x != c.inverse()) stuck("cancellation against a crossing output");
      note("cup-crossing");
      return push(cons(m, inner), n - 1, Generator::eps(x));
    }
    // p == n: the strand and the first untouched step
    Step y = o.g.at(0);
    if (!eps) {
      note("extend");
      Operator m = o;
      m.f.push_back(y);
      m.g.erase(m.g.begin());
      m.chain.push_back({s.b2, s.a2});
      return cons(m, inner);
    }
    if (n == 0) {
      note("cup");
      return cons(op_e(y, detail::slice_of(o.g, 1, o.g.size())), inner);
    }
    // slide the cup below the last crossing
    Step cb = strand_before(n - 1), x = o.f[n - 1], xo = o.chain[n - 1].first;
    const auto& rel = idx_.related(x, y);
    if (std::find(rel.begin(), rel.end(), std::make_pair(cb.inverse(), xo)) == rel.end()) stuck("cup cannot turn");
    note("cup-turn");
    Operator m = o;
    m.f.pop_back();
    m.chain.pop_back();
    m.g.insert(m.g.begin(), x);
    return push_all(cons(m, inner), {{n, Generator::gamma(x, y, cb.inverse(), xo)}, {n - 1, Generator::eps(cb.inverse())}});
  }

  Ops push_h(const Operator& o, const Ops& inner, std::size_t p, const Generator& s) {
    const std::size_t F = o.f.size(), m = o.g.size();
    const bool eps = s.kind == Generator::Kind::Eps;
    auto leg_before = [&](std::size_t i) { return i == 0 ? o.a.inverse() : o.chain[i - 1].second; };
    if (p + 1 < F) {
      note("exchange");
      Operator n = o;
      n.f = detail::splice(o.f, p, s);
      return cons(n, push(inner, p, s));
    }
    if (p >= F + m + 2) {
      note("exchange");
      Operator n = o;
      n.h = detail::splice(o.h, p - F - m - 2, s);
      return cons(n, push(inner, p - 2, s));
    }
    if (p + 1 == F) {
      Step x = o.f[F - 1];
      if (eps) {
        if (x != o.a.inverse()) stuck("cancellation against the cap");
        note("zigzag");
        std::vector<std::pair<std::size_t, Generator>> gens;
        Step d = o.a.inverse();
        for (std::size_t j = 0; j < m; ++j) {
          gens.push_back({F - 1 + j, Generator::gamma(d, o.g[j], o.chain[j].first, o.chain[j].second)});
          d = o.chain[j].second;
        }
        return push_all(inner, gens);
      }
      // the crossing moves onto the cap's right leg
      const auto& rel = idx_.related(s.b2.inverse(), x);
      if (std::find(rel.begin(), rel.end(), std::make_pair(s.a2, o.a.inverse())) == rel.end()) stuck("cap cannot turn");
      note("cap-turn");
      Operator n = o;
      n.f.pop_back();
      n.a = s.b2;
      n.g.insert(n.g.begin(), x);
      n.chain.insert(n.chain.begin(), {s.a2, o.a.inverse()});
      return cons(n, inner);
    }
    if (p == F) {
      if (m == 0) {
        if (eps) {
          if (s.a != o.a.inverse()) stuck("cup and cap disagree");
          note("cap-cup");
          return inner;
        }
        if (s.a2 != s.b2.inverse()) stuck("crossing on a cap is not a cap");
        note("cap-crossing");
        Operator n = o;
        n.a = s.b2;
        return cons(n, inner);
      }
      if (eps) stuck("cancellation of a cap leg against a crossing output");
      if (s.b2 != o.g[0] || s.a2 != o.chain[0].second.inverse()) stuck("crossing with the cap leg is not the expected tile");
      note("cap-slide");
      Operator n = o;
      n.f.push_back(o.g[0]);
      n.a = o.chain[0].second.inverse();
      n.g.erase(n.g.begin());
      n.chain.erase(n.chain.begin());
      return cons(n, inner);
    }
    if (p + 1 < F + m + 1) {
      // both steps were crossed by the right leg
      std::size_t j = p - F - 1;
      Step d = leg_before(j);
      Operator n = o;
      if (!eps) {
        auto yb = yang_baxter(d, o.g[j], o.g[j + 1], s.b2, s.a2, o.chain[j + 1].second);
        if (!yb) stuck("three strands admit no commuting cube");
        note("yang-baxter");
        auto [u, v, ch] = *yb;
        n.g[j] = u;
        n.g[j + 1] = v;
        n.chain[j] = ch[0];
        n.chain[j + 1] = ch[1];
        return cons(n, push(inner, p - 1, Generator::gamma(o.g[j], o.g[j + 1], u, v)));
      }
      if (o.g[j + 1] != o.g[j].inverse() || o.chain[j + 1].second != d) stuck("leg crossing a cancelling pair");
      note("crossing-cancel");
      n.g.erase(n.g.begin() + static_cast<std::ptrdiff_t>(j), n.g.begin() + static_cast<std::ptrdiff_t>(j + 2));
      n.chain.erase(n.chain.begin() + static_cast<std::ptrdiff_t>(j), n.chain.begin() + static_cast<std::ptrdiff_t>(j + 2));
      return cons(n, push(inner, p - 1, Generator::eps(o.g[j + 1])));
    }
    if (p == F + m) {
      // last crossing of the right leg and the leg itself
      Step d = leg_before(m - 1), x = o.g[m - 1];
      Operator n = o;
      n.g.pop_back();
      n.chain.pop_back();
      n.h.insert(n.h.begin(), x);
      if (!eps) {
        if (s.b2 != d || s.a2 != x) stuck("crossing undone by a different tile");
        note("inverse");
        return cons(n, inner);
      }
      if (x != d.inverse()) stuck("cancellation against a crossing output");
      note("cup-crossing");
      return push(cons(n, inner), F + m, Generator::eps(x));
    }
    // p == F + m + 1: the right leg and the first step of h
    Step y = o.h.at(0);
    if (!eps) {
      note("extend");
      Operator n = o;
      n.g.push_back(y);
      n.h.erase(n.h.begin());
      n.chain.push_back({s.b2, s.a2});
      return cons(n, inner);
    }
    if (m == 0) {
      if (y != o.a) stuck("cancellation against the cap leg");
      note("zigzag");
      return inner;
    }
    Step db = leg_before(m - 1), x = o.g[m - 1], xo = o.chain[m - 1].first;
    const auto& rel = idx_.related(x, y);
    if (std::find(rel.begin(), rel.end(), std::make_pair(db.inverse(), xo)) == rel.end()) stuck("cup cannot turn");
    note("cup-turn");
    Operator n = o;
    n.g.pop_back();
    n.chain.pop_back();
    n.h.insert(n.h.begin(), x);
    return push_all(cons(n, inner), {{F + m + 1, Generator::gamma(x, y, db.inverse(), xo)}, {F + m, Generator::eps(db.inverse())}});
  }

  const PrecubicalSet& C_;
  TileIndex idx_;
  std::vector<std::string> trace_;
};

struct RewriteResult {
  CanonicalForm form;
  std::vector<std::string> rules;  // one entry per relation applied
};

/// Rewrites a valid cell slice by slice, bottom to top.
inline RewriteResult rewrite_to_canonical_traced(const PrecubicalSet& C, const FormalTwoCell& phi) {
  auto rep = validate_cell(C, phi);
  if (!rep.ok()) throw Error("invalid 2-cell: " + rep.problems.front());
  Rewriter rw(C);
  auto cf = rw.identity(phi.source);
  for (const auto& s : phi.slices) cf = rw.add(cf, s.position(), s.gen);
  if (cf_source(C, cf) != phi.source || cf_target(C, cf) != phi.target)
    throw std::logic_error("canonical form has different endpoints");
  return {std::move(cf), rw.trace()};
}

inline CanonicalForm rewrite_to_canonical(const PrecubicalSet& C, const FormalTwoCell& phi) {
  return rewrite_to_canonical_traced(C, phi).form;
}

namespace detail {

// One exchange of an H with the operator just outside it; returns false when no such pair remains.
inline bool lift_one_h(const PrecubicalSet& C, const TileIndex& idx, CanonicalForm& cf, std::vector<std::string>& trace) {
  for (std::size_t k = 0; k + 1 < cf.ops.size(); ++k) {
    const Operator& x = cf.ops[k];
    const Operator& hh = cf.ops[k + 1];
    if (x.kind == Operator::Kind::H || hh.kind != Operator::Kind::H) continue;
    const std::size_t F = hh.f.size(), m = hh.g.size();
    std::vector<Operator> repl;
    if (x.kind == Operator::Kind::E) {
      if (F == 0) {
        trace.emplace_back("cancel-cap");
        repl = {op_g(hh.a.inverse(), hh.g, hh.h, hh.chain)};
      } else {
        trace.emplace_back("exchange-cancel");
        auto rest = slice_of(hh.f, 1, F);
        repl = {op_h(rest, hh.a, hh.g, hh.h, hh.chain), op_e(x.a, cat(cat(rest, hh.g), hh.h))};
      }
    } else {
      const std::size_t n = x.f.size();
      auto below = hh.inner_target();
      if (n <= F) {
        trace.emplace_back("exchange-crossing");
        auto hf = cat(cat(outputs(x.chain), {x.strand_end()}), slice_of(hh.f, n, F));
        repl = {op_h(hf, hh.a, hh.g, hh.h, hh.chain), op_g(x.a, slice_of(hh.f, 0, n), slice_of(below, n, below.size()), x.chain)};
      } else {
        // the strand crosses the cap: redo it below the cap and re-derive the leg's crossings
        const bool middle = n - F - 1 <= m;
        trace.emplace_back(middle ? "strand-through-cap" : "strand-past-cap");
        std::size_t crossed = middle ? n - 1 : n - 2;
        auto T = x.target();
        Step cap = x.chain[F].first;
        Step start = F == 0 ? x.a : x.chain[F - 1].second;
        auto tail = slice_of(below, F, crossed);
        bool done = false;
        std::function<bool(Step, std::size_t, Chain&)> dfs = [&](Step c, std::size_t i, Chain& acc) -> bool {
          if (i == tail.size()) {
            auto outs = outputs(acc);
            std::vector<Step> lg, lh;
            auto rest = slice_of(below, crossed, below.size());
            if (middle) {
              lg = cat(cat(outs, {c}), slice_of(rest, 0, m - (n - F - 1)));
              lh = hh.h;
            } else {
              lg = slice_of(outs, 0, m);
              lh = cat(cat(slice_of(outs, m, outs.size()), {c}), slice_of(rest, 0, rest.size()));
            }
            std::vector<std::optional<Step>> want;
            for (std::size_t j = 0; j < lg.size(); ++j) want.push_back(T.at(F + 1 + j));
            auto leg = find_chain(idx, cap.inverse(), lg, want, T.at(F + 1 + lg.size()));
            if (!leg) return false;
            Chain gch(x.chain.begin(), x.chain.begin() + static_cast<std::ptrdiff_t>(F));
            gch.insert(gch.end(), acc.begin(), acc.end());
            Operator nh = op_h(outputs(Chain(x.chain.begin(), x.chain.begin() + static_cast<std::ptrdiff_t>(F))), cap, lg, lh, *leg);
            Operator ng = op_g(x.a, slice_of(below, 0, crossed), slice_of(below, crossed, below.size()), gch);
            if (nh.target() != T) return false;
            repl = {nh, ng};
            return true;
          }
          for (auto [u, v] : idx.related(c, tail[i])) {
            acc.push_back({u, v});
            if (dfs(v, i + 1, acc)) return true;
            acc.pop_back();
          }
          return false;
        };
        Chain acc;
        done = dfs(start, 0, acc);
        if (!done) throw HypothesisViolated("no rewriting moves the strand below the cap");
      }
    }
    cf.ops.erase(cf.ops.begin() + static_cast<std::ptrdiff_t>(k), cf.ops.begin() + static_cast<std::ptrdiff_t>(k + 2));
    cf.ops.insert(cf.ops.begin() + static_cast<std::ptrdiff_t>(k), repl.begin(), repl.end());
    (void)C;
    return true;
  }
  return false;
}

}  // namespace detail

/// Moves every H to the outside, merging it into a G where a cancellation meets its cap.
inline CanonicalForm normalize_canonical(const PrecubicalSet& C, const CanonicalForm& cf,
                                         std::vector<std::string>* trace = nullptr) {
  TileIndex idx(C);
  CanonicalForm out = cf;
  auto src = cf_source(C, cf), tgt = cf_target(C, cf);
  std::vector<std::string> local;
  while (detail::lift_one_h(C, idx, out, local)) {
    if (cf_source(C, out) != src || cf_target(C, out) != tgt) throw std::logic_error("normalization changed the endpoints");
  }
  if (trace) trace->insert(trace->end(), local.begin(), local.end());
  return out;
}

/// Empty when the three standing assumptions on squares hold; otherwise a description of a witness.
inline std::optional<std::string> twocell_hypothesis_failure(const PrecubicalSet& C) {
  for (const auto& t : tiles(C))
    if ((t.a == t.a2) != (t.b == t.b2))
      return "square " + std::to_string(t.square) + " has one pair of opposite sides identified but not the other";
  auto rep = geometricity_report(truncate(C, 2));
  if (!rep.at_most_one_square_closing()) {
    auto [u, x, y] = rep.square_closing_not_unique.front();
    return "squares " + std::to_string(x) + " and " + std::to_string(y) + " close the same corner " + u;
  }
  auto cube = check_cube_property(C);
  if (!cube.holds) return "a half-open cube does not close (horn " + cube.witness->horn + ")";
  return std::nullopt;
}

struct Extraction {
  CanonicalForm canonical, normalized;
  std::vector<Move> moves;
  std::vector<std::string> rules;
};

inline Extraction extract_dihomotopy_traced(const PrecubicalSet& C, const FormalTwoCell& phi) {
  if (auto why = twocell_hypothesis_failure(C)) throw HypothesisViolated(*why);
  if (!is_dipath(phi.source) || !is_dipath(phi.target)) throw NonDirectedEndpoint("the cell does not relate two dipaths");
  Extraction ex;
  auto rw = rewrite_to_canonical_traced(C, phi);
  ex.canonical = rw.form;
  ex.rules = rw.rules;
  ex.normalized = normalize_canonical(C, ex.canonical, &ex.rules);
  if (ex.normalized.count(Operator::Kind::H) || ex.normalized.count(Operator::Kind::E))
    throw std::logic_error("a cap or cancellation survived between dipaths");
  for (const auto& s : expand(C, ex.normalized).slices)
    ex.moves.push_back({Move::Rule::Tile, s.position(), s.gen.b2, s.gen.a2});
  if (!replay(C, phi.source, phi.target, ex.moves)) throw std::logic_error("extracted dihomotopy does not replay");
  return ex;
}

inline std::vector<Move> extract_dihomotopy(const PrecubicalSet& C, const FormalTwoCell& phi) {
  return extract_dihomotopy_traced(C, phi).moves;
}

// ---- serialization

inline std::string step_text(Step s) { return (s.reversed ? "~e" : "e") + std::to_string(s.edge); }

inline nlohmann::json step_json(Step s) { return {{"edge", s.edge}, {"reversed", s.reversed}}; }
inline Step step_from_json(const nlohmann::json& j) { return {j.at("edge").get<std::size_t>(), j.at("reversed").get<bool>()}; }

inline nlohmann::json to_json(const Generator& g) {
  switch (g.kind) {
    case Generator::Kind::Gamma:
      return {{"kind", "gamma"}, {"a", step_json(g.a)}, {"b", step_json(g.b)}, {"b2", step_json(g.b2)}, {"a2", step_json(g.a2)}};
    case Generator::Kind::Eta: return {{"kind", "eta"}, {"a", step_json(g.a)}};
    case Generator::Kind::Eps: return {{"kind", "eps"}, {"a", step_json(g.a)}};
  }
  return {};
}

inline Generator generator_from_json(const nlohmann::json& j) {
  auto k = j.at("kind").get<std::string>();
  if (k == "gamma")
    return Generator::gamma(step_from_json(j.at("a")), step_from_json(j.at("b")), step_from_json(j.at("b2")),
                            step_from_json(j.at("a2")));
  if (k == "eta") return Generator::eta(step_from_json(j.at("a")));
  if (k == "eps") return Generator::eps(step_from_json(j.at("a")));
  throw Error("unknown generator kind '" + k + "'");
}

inline nlohmann::json to_json(const FormalTwoCell& phi) {
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : phi.slices) slices.push_back({{"left", to_json(s.left)}, {"gen", to_json(s.gen)}, {"right", to_json(s.right)}});
  return {{"source", to_json(phi.source)}, {"target", to_json(phi.target)}, {"slices", slices}};
}

inline FormalTwoCell cell_from_json(const nlohmann::json& j) {
  FormalTwoCell phi;
  phi.source = path_from_json(j.at("source"));
  phi.target = path_from_json(j.at("target"));
  for (const auto& s : j.at("slices"))
    phi.slices.push_back({path_from_json(s.at("left")), generator_from_json(s.at("gen")), path_from_json(s.at("right"))});
  return phi;
}

/// Compact form: the source path and a list of [position, generator] pairs.
inline FormalTwoCell cell_from_moves_json(const PrecubicalSet& C, const nlohmann::json& j) {
  CellBuilder b(C, path_from_json(j.at("source")));
  for (const auto& s : j.at("slices")) b.apply(s.at("position").get<std::size_t>(), generator_from_json(s.at("gen")));
  return b.cell();
}

inline std::string to_sexpr(const CanonicalForm& cf) {
  auto list = [](const std::vector<Step>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + step_text(v[i]);
    return s + "]";
  };
  std::string out = "(Z " + std::to_string(cf.base) + ")";
  for (auto it = cf.ops.rbegin(); it != cf.ops.rend(); ++it) {
    const auto& o = *it;
    switch (o.kind) {
      case Operator::Kind::G:
        out = o.f.empty() ? "(I " + step_text(o.a) + " " + out + ")"
                          : "(G " + step_text(o.a) + " " + list(o.f) + " " + list(o.g) + " " + out + ")";
        break;
      case Operator::Kind::H:
        out = "(H " + list(o.f) + " " + step_text(o.a) + " " + list(o.g) + " " + list(o.h) + " " + out + ")";
        break;
      case Operator::Kind::E: out = "(E " + step_text(o.a) + " " + list(o.f) + " " + out + ")"; break;
    }
  }
  return out;
}

}  // namespace dihom
