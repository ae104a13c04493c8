// dihom: analyze concurrent programs and precubical complexes from the command line.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <dihom/gms.hpp>
#include <dihom/lang.hpp>
#include <dihom/npc.hpp>
#include <dihom/paths.hpp>
#include <dihom/pcs_io.hpp>
#include <dihom/twocells.hpp>

using namespace dihom;
using nlohmann::json;

namespace {

enum Exit { ok = 0, negative = 1, parse_error = 2, non_conservative = 3, unknown = 4, hypothesis = 5, io_error = 6 };

struct IoError : Error {
  using Error::Error;
};

struct Source {
  std::string expr, program_file, complex_file;
  int cube = -1, hollow = -1;
};

struct Input {
  PrecubicalSet pcs;
  std::optional<std::size_t> beg, end;
  std::optional<Program> program;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("bad JSON in ") + path + ": " + e.what(), 0, 0);
  }
}

void add_source(CLI::App* cmd, Source& src) {
  cmd->add_option("-e,--expr", src.expr, "program text");
  cmd->add_option("-p,--program", src.program_file, "file holding a program");
  cmd->add_option("-c,--complex", src.complex_file, "complex as JSON");
  cmd->add_option("--cube", src.cube, "standard n-cube");
  cmd->add_option("--hollow", src.hollow, "boundary of the n-cube");
}

Input load(const Source& src) {
  int given = !src.expr.empty() + !src.program_file.empty() + !src.complex_file.empty() + (src.cube >= 0) +
              (src.hollow >= 0);
  if (given != 1) throw Error("give exactly one of --expr, --program, --complex, --cube, --hollow");
  Input in;
  if (!src.complex_file.empty()) {
    auto j = read_json(src.complex_file);
    in.pcs = pcs_from_json(j);
    if (j.contains("beg")) in.beg = j["beg"].get<std::size_t>();
    if (j.contains("end")) in.end = j["end"].get<std::size_t>();
    return in;
  }
  if (src.cube >= 0 || src.hollow >= 0) {
    std::size_t n = static_cast<std::size_t>(std::max(src.cube, src.hollow));
    auto wc = src.cube >= 0 ? standard_cube_words(n) : hollow_cube_words(n);
    in.pcs = wc.pcs;
    in.beg = wc.id(std::string(n, '-'));
    in.end = wc.id(std::string(n, '+'));
    return in;
  }
  in.program = parse(src.expr.empty() ? slurp(src.program_file) : src.expr);
  auto s = semantics(*in.program);
  in.pcs = s.pointed.pcs;
  in.beg = s.pointed.beg;
  if (s.pointed.end != npos) in.end = s.pointed.end;
  return in;
}

std::string fmt(double d) {
  if (std::isinf(d)) return "inf";
  if (std::abs(d) < 1e-12) d = 0;
  std::ostringstream os;
  os << std::setprecision(6) << d;
  return os.str();
}

std::size_t vertex(const Input& in, std::optional<std::size_t> given, std::optional<std::size_t> fallback,
                   const char* what) {
  auto v = given ? given : fallback;
  if (!v) throw Error(std::string("no ") + what + " vertex: pass --" + what);
  if (*v >= in.pcs.vertices()) throw Error(std::string(what) + " vertex out of range");
  return *v;
}

struct Report {
  json data;
  std::string text;
  int code = ok;
};

// ---- commands

Report analyze(const Source& src) {
  Report r;
  std::ostringstream t;
  Input in;
  if (src.complex_file.empty() && src.cube < 0 && src.hollow < 0) {
    auto p = parse(src.expr.empty() ? slurp(src.program_file) : src.expr);
    if (!is_conservative(p)) {
      r.data = {{"conservative", false}};
      r.text = "conservative: false\n";
      r.code = non_conservative;
      return r;
    }
    auto s = semantics(p);
    in.pcs = s.pointed.pcs;
    json range = json::object();
    // potentials are sparse: a missing mutex stands for 0
    auto pots = potential(s.unpruned);
    std::map<std::string, std::pair<int, int>> span;
    for (const auto& pot : pots)
      for (const auto& m : pot) span.emplace(m.first, std::pair{0, 0});
    for (const auto& pot : pots)
      for (auto& [m, lohi] : span) {
        auto it = pot.find(m);
        int v = it == pot.end() ? 0 : it->second;
        lohi = {std::min(lohi.first, v), std::max(lohi.second, v)};
      }
    for (const auto& [m, lohi] : span) range[m] = {lohi.first, lohi.second};
    r.data["conservative"] = true;
    r.data["unpruned_cells"] = s.unpruned.pcs.counts();
    r.data["removed"] = s.removed.size();
    r.data["potentials"] = range;
    r.data["beg"] = s.pointed.beg;
    r.data["end"] = s.pointed.end == npos ? json(nullptr) : json(s.pointed.end);
    t << "conservative: true\n";
    t << "unpruned cells:";
    for (auto c : s.unpruned.pcs.counts()) t << ' ' << c;
    t << "\nremoved vertices: " << s.removed.size() << "\n";
    for (const auto& [m, lohi] : span) t << "potential " << m << ": [" << lohi.first << ", " << lohi.second << "]\n";
  } else {
    in = load(src);
  }
  auto verdict = npc_verdict(in.pcs);
  r.data["vertices"] = in.pcs.vertices();
  r.data["cells"] = in.pcs.counts();
  r.data["npc"] = to_json(verdict);
  t << "vertices: " << in.pcs.vertices() << "\ncells:";
  for (auto c : in.pcs.counts()) t << ' ' << c;
  t << "\nnpc: " << (verdict.npc() ? "true" : "false") << "\nverdict: " << to_json(verdict).dump() << "\n";
  r.text = t.str();
  r.code = verdict.npc() ? ok : negative;
  return r;
}

Report equiv(const Source& src, const std::string& p1, const std::string& p2, const std::string& mode,
             std::size_t budget) {
  auto in = load(src);
  auto f = path_from_text(in.pcs, p1), g = path_from_text(in.pcs, p2);
  Report r;
  std::ostringstream t;
  if (mode == "di") {
    auto w = dihomotopy_witness(in.pcs, f, g);
    r.data = {{"mode", "di"}, {"verdict", w ? "true" : "false"}};
    if (w) r.data["witness"] = to_json(*w);
    r.code = w ? ok : negative;
    t << (w ? "true" : "false") << "\n";
    if (w) t << "witness: " << to_json(*w).dump() << "\n";
  } else if (mode == "ho") {
    auto h = are_homotopic(in.pcs, f, g, budget);
    std::string v = h.verdict == HomotopyResult::Verdict::Yes  ? "true"
                    : h.verdict == HomotopyResult::Verdict::No ? "false"
                                                               : "unknown";
    r.data = {{"mode", "ho"}, {"budget", budget}, {"verdict", v}};
    if (h.verdict == HomotopyResult::Verdict::Yes) r.data["witness"] = to_json(h.witness);
    if (!h.reason.empty()) r.data["reason"] = h.reason;
    r.code = v == "true" ? ok : v == "false" ? negative : unknown;
    t << v << "\n";
    if (h.verdict == HomotopyResult::Verdict::Yes) t << "witness: " << to_json(h.witness).dump() << "\n";
    if (!h.reason.empty()) t << "reason: " << h.reason << "\n";
  } else {
    throw Error("mode must be di or ho");
  }
  r.text = t.str();
  return r;
}

Report classes(const Source& src, std::optional<std::size_t> from, std::optional<std::size_t> to, std::size_t bound) {
  auto in = load(src);
  auto x = vertex(in, from, in.beg, "from"), y = vertex(in, to, in.end, "to");
  auto cls = dihomotopy_classes(in.pcs, x, y, bound);
  Report r;
  std::ostringstream t;
  json arr = json::array();
  t << "classes: " << cls.size() << "\n";
  for (std::size_t i = 0; i < cls.size(); ++i) {
    json members = json::array();
    t << "class " << i << ":\n";
    for (const auto& p : cls[i]) {
      members.push_back(to_text(in.pcs, p));
      t << "  " << to_text(in.pcs, p) << "\n";
    }
    arr.push_back(members);
  }
  r.data = {{"from", x}, {"to", y}, {"bound", bound}, {"count", cls.size()}, {"classes", arr}};
  r.text = t.str();
  return r;
}

Report canonicalize(const Source& src, const std::string& cell_file) {
  auto in = load(src);
  auto j = read_json(cell_file);
  auto phi = j.contains("target") ? cell_from_json(j) : cell_from_moves_json(in.pcs, j);
  auto check = validate_cell(in.pcs, phi);
  if (!check.ok()) throw SyntaxError("invalid cell: " + check.problems.front(), 0, 0);
  Report r;
  std::ostringstream t;
  r.data["slices"] = phi.length();
  t << "slices: " << phi.length() << "\n";
  try {
    auto ex = extract_dihomotopy_traced(in.pcs, phi);
    r.data["canonical"] = to_sexpr(ex.canonical);
    r.data["normalized"] = to_sexpr(ex.normalized);
    r.data["moves"] = to_json(ex.moves);
    r.data["rules"] = ex.rules;
    t << "canonical: " << to_sexpr(ex.canonical) << "\nnormalized: " << to_sexpr(ex.normalized)
      << "\nmoves: " << to_json(ex.moves).dump() << "\n";
  } catch (const NonDirectedEndpoint& e) {
    // the canonical form exists even when the endpoints are not dipaths
    auto cf = rewrite_to_canonical(in.pcs, phi);
    r.data["canonical"] = to_sexpr(cf);
    r.data["extraction"] = e.what();
    t << "canonical: " << to_sexpr(cf) << "\nextraction: " << e.what() << "\n";
    r.code = hypothesis;
  }
  r.text = t.str();
  return r;
}

std::array<std::size_t, 3> triangle(const Input& in, const std::string& spec) {
  std::array<std::size_t, 3> v{0, 1, 2};
  if (spec != "corners") {
    std::stringstream ss(spec);
    std::string tok;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!std::getline(ss, tok, ',')) throw Error("--cat0 takes corners or three vertex ids x,y,z");
      v[i] = std::stoul(tok);
    }
  }
  for (auto x : v)
    if (x >= in.pcs.vertices()) throw Error("triangle vertex out of range");
  return v;
}

Report realize(const Source& src, std::size_t k, const std::string& metric, bool directed, const std::string& cat0,
               std::size_t samples, double tol) {
  auto in = load(src);
  auto rg = realize_grid(in.pcs, k, metric_from_name(metric), directed);
  Report r;
  std::ostringstream t;
  json dv = json::array();
  t << "points: " << rg.space.size() << "\nvertex distances:\n";
  for (std::size_t x = 0; x < in.pcs.vertices(); ++x) {
    json row = json::array();
    for (std::size_t y = 0; y < in.pcs.vertices(); ++y) {
      double d = rg.space(rg.vertex_point(x), rg.vertex_point(y));
      row.push_back(std::isinf(d) ? json(nullptr) : json(d));
      t << (y ? " " : "  ") << fmt(d);
    }
    t << "\n";
    dv.push_back(row);
  }
  r.data = {{"source_hash", complex_hash(in.pcs)}, {"k", k},         {"metric", metric},
            {"directed", directed},                {"points", rg.space.size()}, {"vertex_distances", dv}};
  if (!cat0.empty()) {
    auto v = triangle(in, cat0);
    auto res = cat0_triangle_check(rg, rg.vertex_point(v[0]), rg.vertex_point(v[1]), rg.vertex_point(v[2]), samples,
                                   tol);
    json c = {{"vertices", v}, {"pass", res.pass}, {"samples", res.samples}, {"max_gap", res.max_gap}};
    t << "cat0: " << (res.pass ? "pass" : "fail") << " (" << res.samples << " samples, max gap " << fmt(res.max_gap)
      << ")\n";
    if (!res.pass && res.worst) {
      const auto& w = *res.worst;
      c["witness"] = {{"sides", {w.side_p, w.side_q}}, {"arclength", {w.s_p, w.s_q}}, {"distance", w.distance},
                      {"comparison", w.comparison}, {"gap", w.gap}};
      t << "witness: sides " << w.side_p << "," << w.side_q << " d=" << fmt(w.distance)
        << " flat=" << fmt(w.comparison) << " gap=" << fmt(w.gap) << "\n";
      r.code = negative;
    }
    r.data["cat0"] = c;
  }
  r.text = t.str();
  return r;
}

Report export_cmd(const Source& src, const std::string& what, std::size_t k, const std::string& metric,
                  bool directed) {
  auto in = load(src);
  Report r;
  if (what == "dot") {
    r.text = to_dot(in.pcs);
    r.data = {{"dot", r.text}};
  } else if (what == "json") {
    r.data = to_json(in.pcs);
    if (in.beg) r.data["beg"] = *in.beg;
    if (in.end) r.data["end"] = *in.end;
    r.text = r.data.dump(1) + "\n";
  } else {
    auto rg = realize_grid(in.pcs, k, metric_from_name(metric), directed);
    r.data = to_json(rg);
    r.text = what == "csv" ? to_csv(rg.space) : r.data.dump(1) + "\n";
  }
  return r;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return io_error;
  if (dynamic_cast<const NonConservative*>(&e)) return non_conservative;
  if (dynamic_cast<const HypothesisViolated*>(&e) || dynamic_cast<const NonDirectedEndpoint*>(&e) ||
      dynamic_cast<const NonGeometric*>(&e) || dynamic_cast<const BegForbidden*>(&e) ||
      dynamic_cast<const NotDefined*>(&e))
    return hypothesis;
  return parse_error;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed homotopy of precubical sets and PV programs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text", out_file;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("-o,--out", out_file, "write the result to a file");

  Source src;
  std::string p1, p2, mode = "di", cell_file, metric = "linf", cat0, what;
  std::size_t budget = default_homotopy_budget, bound = 8, k = 8, samples = 200;
  std::optional<std::size_t> from, to;
  double tol = 0.05;
  bool directed = false;

  auto* an = app.add_subcommand("analyze", "semantics, conservativity and the NPC verdict");
  add_source(an, src);

  auto* eq = app.add_subcommand("equiv", "decide dihomotopy or bounded homotopy of two paths");
  add_source(eq, src);
  eq->add_option("--path1", p1, "first path, e.g. \"0 -e1-> 2\"")->required();
  eq->add_option("--path2", p2, "second path")->required();
  eq->add_option("--mode", mode, "di or ho")->check(CLI::IsMember({"di", "ho"}));
  eq->add_option("--budget", budget, "extra length allowed during homotopy search");

  auto* cl = app.add_subcommand("classes", "dihomotopy classes of bounded dipaths");
  add_source(cl, src);
  cl->add_option("--from", from, "start vertex (default: beg)");
  cl->add_option("--to", to, "end vertex (default: end)");
  cl->add_option("--bound", bound, "maximal dipath length");

  auto* ca = app.add_subcommand("canonicalize", "rewrite a formal 2-cell and extract tile moves");
  add_source(ca, src);
  ca->add_option("cell", cell_file, "cell JSON")->required();

  auto* re = app.add_subcommand("realize", "grid realization and comparison-triangle check");
  add_source(re, src);
  re->add_option("--k", k, "grid resolution")->check(CLI::PositiveNumber);
  re->add_option("--metric", metric, "per-cube metric")->check(CLI::IsMember({"linf", "l2"}));
  re->add_flag("--directed", directed, "directed per-axis distance");
  re->add_option("--cat0", cat0, "corners, or vertex ids x,y,z");
  re->add_option("--samples", samples, "sampled pairs");
  re->add_option("--tol", tol, "tolerance")->check(CLI::NonNegativeNumber);

  auto* ex = app.add_subcommand("export", "serialize the complex or its realization");
  add_source(ex, src);
  auto* kinds = ex->add_option_group("kind");
  bool dot = false, as_json = false, space = false, csv = false;
  kinds->add_flag("--dot", dot, "1-skeleton as DOT");
  kinds->add_flag("--json", as_json, "complex as JSON");
  kinds->add_flag("--space", space, "realized space as JSON");
  kinds->add_flag("--csv", csv, "realized distance matrix as CSV");
  kinds->require_option(1);
  ex->add_option("--k", k, "grid resolution")->check(CLI::PositiveNumber);
  ex->add_option("--metric", metric, "per-cube metric")->check(CLI::IsMember({"linf", "l2"}));
  ex->add_flag("--directed", directed, "directed per-axis distance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : parse_error;
  }

  Report r;
  try {
    if (*an) r = analyze(src);
    else if (*eq) r = equiv(src, p1, p2, mode, budget);
    else if (*cl) r = classes(src, from, to, bound);
    else if (*ca) r = canonicalize(src, cell_file);
    else if (*re) r = realize(src, k, metric, directed, cat0, samples, tol);
    else r = export_cmd(src, dot ? "dot" : as_json ? "json" : space ? "space" : "csv", k, metric, directed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  std::string body = format == "json" ? r.data.dump(2) + "\n" : r.text;
  if (out_file.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_file);
    if (!(out << body)) {
      std::cerr << "error: cannot write " << out_file << "\n";
      return io_error;
    }
  }
  return r.code;
}
