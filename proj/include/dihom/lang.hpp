#pragma once

#include <cctype>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pcs.hpp"

namespace dihom {

/** @brief Program AST of the concurrent language with mutexes. */
struct Program {
  enum class Kind { One, Action, P, V, Seq, Or, Par, Star };
  Kind kind = Kind::One;
  std::string name;  // action or mutex name
  std::vector<Program> kids;
  std::size_t line = 1, column = 1;

  static Program one() { return {}; }
  static Program leaf(Kind k, std::string n) {
    Program p;
    p.kind = k;
    p.name = std::move(n);
    return p;
  }
  static Program node(Kind k, Program a) {
    Program p;
    p.kind = k;
    p.kids.push_back(std::move(a));
    return p;
  }
  static Program node(Kind k, Program a, Program b) {
    Program p;
    p.kind = k;
    p.kids.push_back(std::move(a));
    p.kids.push_back(std::move(b));
    return p;
  }

  friend bool operator==(const Program& a, const Program& b) {
    return a.kind == b.kind && a.name == b.name && a.kids == b.kids;
  }
};

namespace detail {

inline int precedence(Program::Kind k) {
  switch (k) {
    case Program::Kind::Or: return 0;
    case Program::Kind::Par: return 1;
    case Program::Kind::Seq: return 2;
    default: return 3;
  }
}

inline void print(const Program& p, std::string& out, int ctx) {
  using K = Program::Kind;
  int prec = precedence(p.kind);
  bool paren = prec < ctx;
  if (paren) out += '(';
  switch (p.kind) {
    case K::One: out += '1'; break;
    case K::Action: out += p.name; break;
    case K::P: out += "P(" + p.name + ")"; break;
    case K::V: out += "V(" + p.name + ")"; break;
    case K::Star:
      out += '*';
      print(p.kids[0], out, 3);
      break;
    case K::Seq:
    case K::Or:
    case K::Par: {
      const char* op = p.kind == K::Seq ? ";" : p.kind == K::Or ? " + " : " || ";
      // left-associative: the right operand needs a strictly tighter context
      print(p.kids[0], out, prec);
      out += op;
      print(p.kids[1], out, prec + 1);
      break;
    }
  }
  if (paren) out += ')';
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Program parse() {
    Program p = choice();
    skip();
    if (i_ < s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        advance();
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool eat(const std::string& tok) {
    skip();
    if (s_.compare(i_, tok.size(), tok) != 0) return false;
    for (std::size_t k = 0; k < tok.size(); ++k) advance();
    return true;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string ident() {
    skip();
    if (i_ >= s_.size() || !ident_start(s_[i_])) fail("expected identifier");
    std::size_t l = line_, c = col_;
    std::string id;
    while (i_ < s_.size() && ident_char(s_[i_])) {
      id += s_[i_];
      advance();
    }
    if (id == "nop") throw SyntaxError("'nop' is reserved", l, c);
    return id;
  }

  Program choice() {
    Program p = par();
    while (eat("+")) p = Program::node(Program::Kind::Or, std::move(p), par());
    return p;
  }

  Program par() {
    Program p = seq();
    while (eat("||")) p = Program::node(Program::Kind::Par, std::move(p), seq());
    return p;
  }

  Program seq() {
    Program p = atom();
    while (eat(";")) p = Program::node(Program::Kind::Seq, std::move(p), atom());
    return p;
  }

  Program atom() {
    skip();
    std::size_t l = line_, c = col_;
    Program p;
    if (i_ >= s_.size()) fail("unexpected end of input");
    if (eat("1")) {
      p = Program::one();
    } else if (eat("*")) {
      p = Program::node(Program::Kind::Star, atom());
    } else if (eat("(")) {
      p = choice();
      if (!eat(")")) fail("expected ')'");
    } else if (ident_start(s_[i_])) {
      std::size_t save_i = i_, save_l = line_, save_c = col_;
      std::string id;
      while (i_ < s_.size() && ident_char(s_[i_])) {
        id += s_[i_];
        advance();
      }
      if ((id == "P" || id == "V") && eat("(")) {
        std::string m = ident();
        if (!eat(")")) fail("expected ')'");
        p = Program::leaf(id == "P" ? Program::Kind::P : Program::Kind::V, m);
      } else {
        i_ = save_i;
        line_ = save_l;
        col_ = save_c;
        p = Program::leaf(Program::Kind::Action, ident());
      }
    } else {
      fail("unexpected '" + std::string(1, s_[i_]) + "'");
    }
    p.line = l;
    p.column = c;
    return p;
  }

  const std::string& s_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;
};

}  // namespace detail

inline Program parse(const std::string& text) { return detail::Parser(text).parse(); }

inline std::string to_string(const Program& p) {
  std::string out;
  detail::print(p, out, 0);
  return out;
}

struct LintWarning {
  std::size_t line, column;
  std::string message;
};

/// Occurrences of 1 as a subterm; such programs may have non-geometric semantics.
inline std::vector<LintWarning> lint(const Program& p) {
  std::vector<LintWarning> out;
  std::vector<const Program*> todo{&p};
  while (!todo.empty()) {
    const Program* q = todo.back();
    todo.pop_back();
    if (q->kind == Program::Kind::One && q != &p) out.push_back({q->line, q->column, "subterm '1'"});
    for (auto it = q->kids.rbegin(); it != q->kids.rend(); ++it) todo.push_back(&*it);
  }
  return out;
}

/// Mutex -> net resource change; absent keys are zero.
using ResourceVector = std::map<std::string, int>;

inline ResourceVector add(ResourceVector a, const ResourceVector& b) {
  for (auto& [k, v] : b)
    if ((a[k] += v) == 0) a.erase(k);
  return a;
}

inline ResourceVector delta(const Program& p) {
  using K = Program::Kind;
  switch (p.kind) {
    case K::One:
    case K::Action: return {};
    case K::P: return {{p.name, -1}};
    case K::V: return {{p.name, 1}};
    case K::Seq:
    case K::Par: return add(delta(p.kids[0]), delta(p.kids[1]));
    case K::Or: {
      auto a = delta(p.kids[0]);
      if (a != delta(p.kids[1])) throw NonConservative("branches differ in resource use", to_string(p));
      return a;
    }
    case K::Star:
      if (!delta(p.kids[0]).empty()) throw NonConservative("loop body not balanced", to_string(p));
      return {};
  }
  return {};
}

inline bool is_conservative(const Program& p) {
  try {
    delta(p);
    return true;
  } catch (const NonConservative&) {
    return false;
  }
}

inline const std::string& nop_label() {
  static const std::string s = "nop";
  return s;
}

/** @brief Labelled precubical set with a start and an end vertex. */
struct PointedPcs {
  PrecubicalSet pcs;
  std::size_t beg = 0, end = 0;
};

namespace detail {

inline PointedPcs single_edge(const std::string& label) {
  PointedPcs r;
  r.pcs.add_vertex();
  r.pcs.add_vertex();
  r.pcs.add_edge(0, 1, label);
  r.beg = 0;
  r.end = 1;
  return r;
}

inline PointedPcs sequence(const PointedPcs& a, const PointedPcs& b) {
  auto co = coproduct(a.pcs, b.pcs);
  std::size_t off = co.right_offset[0];
  auto g = glue_vertices(co.pcs, {{a.end, b.beg + off}});
  return {std::move(g.pcs), g.vertex_map[a.beg], g.vertex_map[b.end + off]};
}

inline PointedPcs prefixed(const PointedPcs& a) { return sequence(single_edge(nop_label()), a); }

}  // namespace detail

/// Compositional precubical semantics before pruning forbidden states.
inline PointedPcs cs_semantics(const Program& p) {
  using K = Program::Kind;
  switch (p.kind) {
    case K::One: {
      PointedPcs r;
      r.pcs.add_vertex();
      return r;
    }
    case K::Action: return detail::single_edge(p.name);
    case K::P: return detail::single_edge("P(" + p.name + ")");
    case K::V: return detail::single_edge("V(" + p.name + ")");
    case K::Seq: return detail::sequence(cs_semantics(p.kids[0]), cs_semantics(p.kids[1]));
    case K::Or: {
      auto a = detail::prefixed(cs_semantics(p.kids[0]));
      auto b = detail::prefixed(cs_semantics(p.kids[1]));
      auto co = coproduct(a.pcs, b.pcs);
      std::size_t off = co.right_offset[0];
      auto g = glue_vertices(co.pcs, {{a.beg, b.beg + off}, {a.end, b.end + off}});
      return {std::move(g.pcs), g.vertex_map[a.beg], g.vertex_map[a.end]};
    }
    case K::Par: {
      auto a = cs_semantics(p.kids[0]);
      auto b = cs_semantics(p.kids[1]);
      auto t = tensor(a.pcs, b.pcs);
      return {std::move(t.pcs), t.id(0, a.beg, 0, b.beg), t.id(0, a.end, 0, b.end)};
    }
    case K::Star: {
      auto body = detail::prefixed(cs_semantics(p.kids[0]));
      auto exit = detail::single_edge(nop_label());
      auto co = coproduct(body.pcs, exit.pcs);
      std::size_t off = co.right_offset[0];
      auto g = glue_vertices(co.pcs, {{body.beg, body.end}, {body.beg, exit.beg + off}});
      return {std::move(g.pcs), g.vertex_map[body.beg], g.vertex_map[exit.end + off]};
    }
  }
  return {};
}

/// Resource change carried by an edge label.
inline ResourceVector edge_delta(const std::optional<std::string>& label) {
  if (!label || label->size() < 4 || label->back() != ')' || (*label)[1] != '(') return {};
  char op = (*label)[0];
  std::string m = label->substr(2, label->size() - 3);
  if (op == 'P') return {{m, -1}};
  if (op == 'V') return {{m, 1}};
  return {};
}

inline ResourceVector negate(ResourceVector v) {
  for (auto& [k, x] : v) x = -x;
  return v;
}

/// Resource potential of every vertex, by breadth-first search from beg over edges in both directions.
inline std::vector<ResourceVector> potential(const PointedPcs& pp) {
  const auto& C = pp.pcs;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(C.vertices());  // (edge, neighbour)
  for (std::size_t e = 0; e < C.count(1); ++e) {
    adj[C.source(e)].push_back({e, C.target(e)});
    adj[C.target(e)].push_back({e, C.source(e)});
  }
  std::vector<ResourceVector> pot(C.vertices());
  std::vector<std::size_t> via(C.vertices(), npos);
  std::vector<char> seen(C.vertices(), 0);
  std::deque<std::size_t> queue{pp.beg};
  seen[pp.beg] = 1;
  auto trace = [&](std::size_t v) {
    std::string s = std::to_string(v);
    while (v != pp.beg) {
      std::size_t e = via[v];
      v = C.source(e) == v ? C.target(e) : C.source(e);
      s = std::to_string(v) + " -e" + std::to_string(e) + "- " + s;
    }
    return s;
  };
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (auto [e, w] : adj[v]) {
      auto d = edge_delta(C.label(e));
      auto expect = C.source(e) == v ? add(pot[v], d) : add(pot[v], negate(d));
      if (!seen[w]) {
        seen[w] = 1;
        pot[w] = expect;
        via[w] = e;
        queue.push_back(w);
      } else if (pot[w] != expect) {
        throw InconsistentPotential("paths disagree at vertex " + std::to_string(w) + ": [" + trace(w) + "] vs [" +
                                    trace(v) + " -e" + std::to_string(e) + "- " + std::to_string(w) + "]");
      }
    }
  }
  return pot;
}

inline bool forbidden(const ResourceVector& r) {
  for (auto& [k, v] : r)
    if (v < -1 || v > 0) return true;
  return false;
}

/** @brief Pruned semantics together with the unpruned stage. */
struct Semantics {
  PointedPcs pointed;        // end is npos when the end state is forbidden
  PointedPcs unpruned;
  std::vector<std::size_t> removed;  // unpruned vertex ids
  Embedding embedding;
};

inline Semantics semantics(const Program& p) {
  delta(p);
  Semantics s;
  s.unpruned = cs_semantics(p);
  auto pot = potential(s.unpruned);
  for (std::size_t v = 0; v < pot.size(); ++v)
    if (forbidden(pot[v])) s.removed.push_back(v);
  if (forbidden(pot[s.unpruned.beg])) throw BegForbidden("start state is forbidden");
  s.embedding = remove_vertices(s.unpruned.pcs, s.removed);
  s.pointed.pcs = s.embedding.pcs;
  s.pointed.beg = s.embedding.from_parent[0][s.unpruned.beg];
  s.pointed.end = s.embedding.from_parent[0][s.unpruned.end];
  return s;
}

inline std::string to_string(const ResourceVector& r) {
  std::string out = "{";
  for (auto& [k, v] : r) {
    if (out.size() > 1) out += ", ";
    out += k + ":" + std::to_string(v);
  }
  return out + "}";
}

}  // namespace dihom
