#include <gtest/gtest.h>

#include <dihom/lang.hpp>
#include <dihom/twocells.hpp>

#include <iostream>
#include <random>
#include <set>

#include "support.hpp"

using namespace dihom;
using namespace dihom::fixtures;
using K = Operator::Kind;

namespace {

Step fwd(const WordComplex& wc, const std::string& w) { return {wc.id(w), false}; }

// The unique crossing of the two steps at pos, as found in the tile relation.
Generator crossing(const PrecubicalSet& C, const PathT& p, std::size_t pos) {
  TileIndex idx(C);
  const auto& rel = idx.related(p.steps.at(pos), p.steps.at(pos + 1));
  EXPECT_EQ(rel.size(), 1u);
  return Generator::gamma(p.steps[pos], p.steps[pos + 1], rel.at(0).first, rel.at(0).second);
}

CellBuilder& cross(const PrecubicalSet& C, CellBuilder& b, std::size_t pos) { return b.apply(pos, crossing(C, b.current(), pos)); }

CanonicalForm normal(const PrecubicalSet& C, const FormalTwoCell& phi) {
  return normalize_canonical(C, rewrite_to_canonical(C, phi));
}

}  // namespace

TEST(Cells, IdentityIsValid) {
  auto Y2 = standard_cube_words(2);
  auto f = word_path(Y2, "--", {"-0", "0+"});
  auto id = identity_cell(f);
  EXPECT_TRUE(validate_cell(Y2.pcs, id).ok());
  EXPECT_EQ(cell_length(id), 0u);
}

TEST(Cells, MutatedGammaIsInvalid) {
  auto Y2 = standard_cube_words(2);
  CellBuilder b(Y2.pcs, word_path(Y2, "--", {"-0", "0+"}));
  cross(Y2.pcs, b, 0);
  auto phi = b.cell();
  ASSERT_TRUE(validate_cell(Y2.pcs, phi).ok());
  // claim a target the square does not relate to the source
  std::swap(phi.slices[0].gen.b2, phi.slices[0].gen.a2);
  auto rep = validate_cell(Y2.pcs, phi);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.problems[0].find("slice 0"), std::string::npos);
}

TEST(Cells, CubeWithoutBottomWitnessIsValid) {
  auto W = cube_without_bottom_words();
  auto f = word_path(W, "---", {"--0", "0-+"}), g = word_path(W, "---", {"0--", "+-0"});
  auto h = are_homotopic(W.pcs, f, g);
  ASSERT_EQ(h.verdict, HomotopyResult::Verdict::Yes);
  auto phi = cell_from_moves(W.pcs, f, h.witness);
  EXPECT_TRUE(validate_cell(W.pcs, phi).ok());
  EXPECT_EQ(phi.target, g);
  EXPECT_EQ(cell_length(phi), h.witness.size());
  // the complex misses the bottom square, so the rewriting hypotheses fail there
  EXPECT_THROW(extract_dihomotopy(W.pcs, phi), HypothesisViolated);
}

TEST(Cells, LengthCountsSlices) {
  auto Y3 = standard_cube_words(3);
  CellBuilder b(Y3.pcs, word_path(Y3, "---", {"0--", "+0-", "++0"}));
  EXPECT_EQ(cell_length(b.cell()), 0u);
  cross(Y3.pcs, b, 0);
  EXPECT_EQ(cell_length(b.cell()), 1u);
  cross(Y3.pcs, b, 1);
  cross(Y3.pcs, b, 0);
  EXPECT_EQ(cell_length(b.cell()), 3u);
}

TEST(GammaGeneral, BaseAndInduction) {
  auto Y3 = standard_cube_words(3);
  auto a = fwd(Y3, "0--");
  auto base = gamma_general(Y3.pcs, a, PathT{Y3.id("+--"), {}});
  EXPECT_EQ(base.length(), 0u);
  EXPECT_EQ(base.source.steps, std::vector<Step>{a});

  auto f = word_path(Y3, "+--", {"+0-", "++0"});
  auto phi = gamma_general(Y3.pcs, a, f);
  EXPECT_EQ(phi.length(), 2u);
  EXPECT_TRUE(validate_cell(Y3.pcs, phi).ok());
  EXPECT_EQ(phi.target, word_path(Y3, "---", {"-0-", "-+0", "0++"}));

  auto holed = cube_subcomplex(3, [](const CubeWord& w) { return zeros_in(w) < 3 && w != "0+0"; });
  EXPECT_THROW(gamma_general(holed.pcs, fwd(holed, "0--"), word_path(holed, "+--", {"+0-", "++0"})), NotDefined);
}

TEST(Canonical, IdentityIsStackOfI) {
  auto Y2 = standard_cube_words(2);
  auto f = word_path(Y2, "--", {"-0", "0+"});
  auto cf = rewrite_to_canonical(Y2.pcs, identity_cell(f));
  ASSERT_EQ(cf.ops.size(), 2u);
  for (const auto& o : cf.ops) EXPECT_TRUE(o.is_identity());
  EXPECT_EQ(cf.base, Y2.id("++"));
  EXPECT_EQ(to_sexpr(cf), "(I e" + std::to_string(f.steps[0].edge) + " (I e" + std::to_string(f.steps[1].edge) + " (Z " +
                              std::to_string(cf.base) + ")))");
}

TEST(Canonical, CapBecomesH) {
  auto Y2 = standard_cube_words(2);
  auto f = word_path(Y2, "--", {"-0", "0+"});
  CellBuilder b(Y2.pcs, f);
  b.apply(1, Generator::eta(fwd(Y2, "0+")));
  auto cf = rewrite_to_canonical(Y2.pcs, b.cell());
  ASSERT_FALSE(cf.ops.empty());
  const auto& h = cf.ops.front();
  EXPECT_EQ(h.kind, K::H);
  EXPECT_EQ(h.f, std::vector<Step>{f.steps[0]});
  EXPECT_TRUE(h.g.empty());
  EXPECT_EQ(h.h, std::vector<Step>{f.steps[1]});
  EXPECT_TRUE(well_typed(Y2.pcs, cf));
}

TEST(Canonical, CrossingsOnlyGiveGAndI) {
  auto Y3 = standard_cube_words(3);
  CellBuilder b(Y3.pcs, word_path(Y3, "---", {"0--", "+0-", "++0"}));
  cross(Y3.pcs, b, 0);
  cross(Y3.pcs, b, 1);
  cross(Y3.pcs, b, 0);
  cross(Y3.pcs, b, 1);
  auto cf = rewrite_to_canonical(Y3.pcs, b.cell());
  EXPECT_EQ(cf.count(K::H), 0u);
  EXPECT_EQ(cf.count(K::E), 0u);
  EXPECT_TRUE(well_typed(Y3.pcs, cf));
  EXPECT_EQ(cf_target(Y3.pcs, cf), b.current());
}

// Both members of each relation rewrite to the same canonical form.
TEST(Canonical, RelationMembersAgree) {
  auto Y2 = standard_cube_words(2);
  const auto& C = Y2.pcs;
  Step a = fwd(Y2, "0-"), b = fwd(Y2, "-0"), a2 = fwd(Y2, "0+"), b2 = fwd(Y2, "+0");
  auto agree = [&](const FormalTwoCell& l, const FormalTwoCell& r) {
    ASSERT_TRUE(validate_cell(C, l).ok());
    ASSERT_TRUE(validate_cell(C, r).ok());
    ASSERT_EQ(l.source, r.source);
    ASSERT_EQ(l.target, r.target);
    EXPECT_EQ(to_sexpr(normal(C, l)), to_sexpr(normal(C, r)));
  };
  PathT ba{Y2.id("--"), {b, a2}};
  {  // a crossing followed by its inverse
    CellBuilder l(C, ba);
    cross(C, l, 0);
    cross(C, l, 0);
    agree(l.cell(), identity_cell(ba));
  }
  {  // both zigzags
    CellBuilder l(C, PathT{Y2.id("--"), {a}});
    l.apply(0, Generator::eta(a)).apply(1, Generator::eps(a));
    agree(l.cell(), identity_cell(PathT{Y2.id("--"), {a}}));
    CellBuilder r(C, PathT{Y2.id("+-"), {a.inverse()}});
    r.apply(1, Generator::eta(a)).apply(0, Generator::eps(a));
    agree(r.cell(), identity_cell(PathT{Y2.id("+-"), {a.inverse()}}));
  }
  {  // a cap cancelled at once
    CellBuilder l(C, PathT{Y2.id("--"), {}});
    l.apply(0, Generator::eta(a)).apply(0, Generator::eps(a.inverse()));
    agree(l.cell(), identity_cell(PathT{Y2.id("--"), {}}));
  }
  {  // a crossing turning around a cap, in both directions
    CellBuilder l(C, PathT{Y2.id("--"), {b}});
    l.apply(1, Generator::eta(a2));
    cross(C, l, 0);
    CellBuilder r(C, PathT{Y2.id("--"), {b}});
    r.apply(0, Generator::eta(a));
    cross(C, r, 1);
    agree(l.cell(), r.cell());
  }
  {  // a crossing turning around a cup
    CellBuilder l(C, PathT{Y2.id("+-"), {a.inverse(), b, a2}});
    cross(C, l, 0);
    l.apply(1, Generator::eps(a2));
    CellBuilder r(C, PathT{Y2.id("+-"), {a.inverse(), b, a2}});
    cross(C, r, 1);
    r.apply(0, Generator::eps(a));
    agree(l.cell(), r.cell());
  }
  {  // sliding a cap across a strand
    CellBuilder l(C, PathT{Y2.id("--"), {b}});
    l.apply(0, Generator::eta(a));
    cross(C, l, 1);
    cross(C, l, 0);
    CellBuilder r(C, PathT{Y2.id("--"), {b}});
    r.apply(1, Generator::eta(a2));
    agree(l.cell(), r.cell());
  }
  (void)b2;
}

TEST(Canonical, CubeRelationMembersAgree) {
  auto Y3 = standard_cube_words(3);
  const auto& C = Y3.pcs;
  auto f = word_path(Y3, "---", {"0--", "+0-", "++0"});
  CellBuilder l(C, f), r(C, f);
  cross(C, l, 0);
  cross(C, l, 1);
  cross(C, l, 0);
  cross(C, r, 1);
  cross(C, r, 0);
  cross(C, r, 1);
  ASSERT_EQ(l.current(), r.current());
  EXPECT_EQ(to_sexpr(normal(C, l.cell())), to_sexpr(normal(C, r.cell())));
}

TEST(Normalize, CancelAgainstCapGivesG) {
  auto Y2 = standard_cube_words(2);
  Step a = fwd(Y2, "0-");
  CanonicalForm cf{Y2.id("--"), {op_e(a, {a.inverse()}), op_h({}, a, {}, {}, {})}};
  ASSERT_TRUE(well_typed(Y2.pcs, cf));
  std::vector<std::string> trace;
  auto n = normalize_canonical(Y2.pcs, cf, &trace);
  ASSERT_EQ(n.ops.size(), 1u);
  EXPECT_EQ(n.ops[0].kind, K::G);
  EXPECT_EQ(trace, std::vector<std::string>{"cancel-cap"});
  EXPECT_EQ(cf_target(Y2.pcs, n), cf_target(Y2.pcs, cf));
}

TEST(Normalize, GOverHExchanges) {
  auto Y2 = standard_cube_words(2);
  Step a = fwd(Y2, "0-"), b = fwd(Y2, "-0");
  // I(b) applied to a cap inserted at the start of the empty path at -+
  CanonicalForm cf{Y2.id("-+"), {op_g(b, {}, {a.inverse(), a}, {}), op_h({}, a.inverse().inverse(), {}, {}, {})}};
  cf.ops[1] = op_h({}, fwd(Y2, "0+"), {}, {}, {});
  cf.ops[0].g = {fwd(Y2, "0+"), fwd(Y2, "0+").inverse()};
  ASSERT_TRUE(well_typed(Y2.pcs, cf));
  auto n = normalize_canonical(Y2.pcs, cf);
  ASSERT_EQ(n.ops.size(), 2u);
  EXPECT_EQ(n.ops[0].kind, K::H);
  EXPECT_TRUE(n.ops[1].is_identity());
  EXPECT_TRUE(well_typed(Y2.pcs, n));
}

TEST(Normalize, FixpointWithoutCaps) {
  auto Y3 = standard_cube_words(3);
  CellBuilder b(Y3.pcs, word_path(Y3, "---", {"0--", "+0-", "++0"}));
  cross(Y3.pcs, b, 1);
  cross(Y3.pcs, b, 0);
  auto cf = rewrite_to_canonical(Y3.pcs, b.cell());
  EXPECT_EQ(normalize_canonical(Y3.pcs, cf), cf);
}

TEST(Extract, SingleTileAndIdentity) {
  auto Y2 = standard_cube_words(2);
  auto f = word_path(Y2, "--", {"-0", "0+"});
  CellBuilder b(Y2.pcs, f);
  cross(Y2.pcs, b, 0);
  auto moves = extract_dihomotopy(Y2.pcs, b.cell());
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(moves[0].rule, Move::Rule::Tile);
  EXPECT_EQ(moves[0].position, 0u);
  EXPECT_TRUE(extract_dihomotopy(Y2.pcs, identity_cell(f)).empty());
}

TEST(Extract, DetourThroughCapBecomesTile) {
  auto Y2 = standard_cube_words(2);
  Step a = fwd(Y2, "0-"), a2 = fwd(Y2, "0+");
  CellBuilder b(Y2.pcs, word_path(Y2, "--", {"-0", "0+"}));
  b.apply(0, Generator::eta(a));
  cross(Y2.pcs, b, 1);
  b.apply(2, Generator::eps(a2));
  auto phi = b.cell();
  ASSERT_TRUE(validate_cell(Y2.pcs, phi).ok());
  auto ex = extract_dihomotopy_traced(Y2.pcs, phi);
  EXPECT_EQ(ex.moves.size(), 1u);
  EXPECT_EQ(ex.normalized.count(K::H) + ex.normalized.count(K::E), 0u);
  EXPECT_TRUE(replay(Y2.pcs, phi.source, phi.target, ex.moves));
}

TEST(Extract, RejectsBadInputs) {
  auto Y2 = standard_cube_words(2);
  Step a = fwd(Y2, "0-");
  CellBuilder b(Y2.pcs, PathT{Y2.id("--"), {}});
  b.apply(0, Generator::eta(a));
  EXPECT_THROW(extract_dihomotopy(Y2.pcs, b.cell()), NonDirectedEndpoint);
  auto cyl = cylinder();
  EXPECT_TRUE(twocell_hypothesis_failure(cyl).has_value());
  EXPECT_THROW(extract_dihomotopy(cyl, identity_cell(PathT{0, {{0, false}}})), HypothesisViolated);
}

TEST(Extract, SynthesizedHomotopiesOnCubes) {
  std::mt19937 rng(17);
  for (std::size_t n : {2u, 3u, 4u}) {
    auto Y = standard_cube_words(n);
    std::string lo(n, '-'), hi(n, '+');
    for (int t = 0; t < 15; ++t) {
      auto paths = dipaths(Y.pcs, Y.id(lo), Y.id(hi), n);
      const auto& s = paths[rng() % paths.size()];
      auto h = synthesize_homotopy(Y.pcs, s, rng, 1 + t % 3, 3);
      ASSERT_TRUE(replay(Y.pcs, h.source, h.target, h.moves));
      auto phi = cell_from_moves(Y.pcs, h.source, h.moves);
      auto ex = extract_dihomotopy_traced(Y.pcs, phi);
      EXPECT_TRUE(replay(Y.pcs, h.source, h.target, ex.moves));
      for (const auto& m : ex.moves) EXPECT_EQ(m.rule, Move::Rule::Tile);
    }
  }
}

TEST(Extract, SynthesizedHomotopiesOnProgramSemantics) {
  std::mt19937 rng(23);
  ProgramGenerator gen(29);
  std::size_t done = 0;
  for (int i = 0; i < 40 && done < 15; ++i) {
    auto s = semantics(gen.program(2, 3));
    const auto& C = s.pointed.pcs;
    if (s.pointed.end == npos || twocell_hypothesis_failure(C)) continue;
    auto paths = dipaths(C, s.pointed.beg, s.pointed.end, 8);
    if (paths.empty()) continue;
    auto h = synthesize_homotopy(C, paths[rng() % paths.size()], rng, 2, 3);
    auto phi = cell_from_moves(C, h.source, h.moves);
    auto moves = extract_dihomotopy(C, phi);
    EXPECT_TRUE(replay(C, h.source, h.target, moves));
    ++done;
  }
  EXPECT_GE(done, 5u);
}

TEST(Serialization, CellJsonRoundTrip) {
  auto Y2 = standard_cube_words(2);
  CellBuilder b(Y2.pcs, word_path(Y2, "--", {"-0", "0+"}));
  b.apply(0, Generator::eta(fwd(Y2, "0-")));
  cross(Y2.pcs, b, 1);
  auto phi = b.cell();
  EXPECT_EQ(cell_from_json(nlohmann::json::parse(to_json(phi).dump())), phi);
}

TEST(Extract, RandomCellsExerciseTheRules) {
  std::mt19937 rng(101);
  std::set<std::string> seen;
  for (std::size_t n : {2u, 3u}) {
    auto Y = standard_cube_words(n);
    std::string lo(n, '-'), hi(n, '+');
    auto paths = dipaths(Y.pcs, Y.id(lo), Y.id(hi), n);
    for (int t = 0; t < 60; ++t) {
      auto h = synthesize_homotopy(Y.pcs, paths[rng() % paths.size()], rng, 1 + t % 4, 2 + t % 3);
      auto ex = extract_dihomotopy_traced(Y.pcs, cell_from_moves(Y.pcs, h.source, h.moves));
      seen.insert(ex.rules.begin(), ex.rules.end());
    }
  }
  for (const char* r : {"cap", "exchange", "extend", "inverse", "yang-baxter", "zigzag", "cup-turn"})
    EXPECT_TRUE(seen.count(r)) << r;
  std::string all;
  for (const auto& r : seen) all += r + " ";
  RecordProperty("rules", all);
  std::cout << "rules seen: " << all << "\n";
}

// Random walks of homotopy moves between arbitrary paths: every canonical form stays well typed.
TEST(Canonical, RandomHomotopiesBetweenAnyPaths) {
  std::mt19937 rng(7);
  std::set<std::string> seen;
  for (const auto& fx : {Fixture{"Y2", standard_cube(2)}, Fixture{"Y3", standard_cube(3)}}) {
    const auto& C = fx.pcs;
    TileIndex idx(C);
    auto out = outgoing_steps(C);
    for (int t = 0; t < 200; ++t) {
      PathT s{rng() % C.vertices(), {}};
      for (int k = 0; k < 3; ++k) {
        std::vector<Step> opts;
        for (std::size_t e = 0; e < C.count(1); ++e)
          for (bool r : {false, true})
            if (step_source(C, Step{e, r}) == path_end(C, s)) opts.push_back({e, r});
        s.steps.push_back(opts[rng() % opts.size()]);
      }
      std::vector<Move> moves;
      PathT cur = s;
      for (int k = 0; k < 8; ++k) {
        std::vector<Move> ms;
        for_each_homotopy_move(C, idx, out, cur, 7, [&](const Move& m) { ms.push_back(m); });
        auto m = ms[rng() % ms.size()];
        moves.push_back(m);
        cur = apply(C, cur, m);
      }
      auto phi = cell_from_moves(C, s, moves);
      std::vector<std::string> rules;
      auto rw = rewrite_to_canonical_traced(C, phi);
      auto n = normalize_canonical(C, rw.form, &rules);
      ASSERT_TRUE(well_typed(C, rw.form)) << to_sexpr(rw.form);
      ASSERT_TRUE(well_typed(C, n)) << to_sexpr(n);
      EXPECT_EQ(cf_source(C, n), s);
      EXPECT_EQ(cf_target(C, n), cur);
      bool outer = true;
      for (const auto& o : n.ops) {
        if (o.kind != K::H) outer = false;
        else EXPECT_TRUE(outer) << to_sexpr(n);
      }
      seen.insert(rw.rules.begin(), rw.rules.end());
      seen.insert(rules.begin(), rules.end());
    }
  }
  // caps are created outermost and never pushed inwards, so rewriting alone already keeps them in front
  EXPECT_TRUE(seen.count("cup"));
  EXPECT_FALSE(seen.count("cancel-cap"));
}

namespace {

// A random operator stack, grown from the inside out.
CanonicalForm random_form(const PrecubicalSet& C, const TileIndex& idx, std::mt19937& rng, int size) {
  CanonicalForm cf{rng() % C.vertices(), {}};
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (int k = 0; k < size; ++k) {
    auto src = cf_source(C, cf);
    auto tgt = cf_target(C, cf).steps;
    std::size_t kind = pick(4);
    if (kind == 3 && !tgt.empty()) {
      cf.ops.insert(cf.ops.begin(), op_e(tgt[0], detail::slice_of(tgt, 1, tgt.size())));
      continue;
    }
    if (kind == 2) {
      std::size_t pos = pick(tgt.size() + 1);
      std::size_t v = src.start;
      for (std::size_t i = 0; i < pos; ++i) v = step_target(C, tgt[i]);
      std::vector<Step> opts;
      for (std::size_t e = 0; e < C.count(1); ++e)
        for (bool r : {false, true})
          if (step_source(C, Step{e, r}) == v) opts.push_back({e, r});
      Step a = opts[pick(opts.size())];
      auto rest = detail::slice_of(tgt, pos, tgt.size());
      std::size_t len = pick(rest.size() + 1);
      auto g = detail::slice_of(rest, 0, len);
      auto ch = detail::find_chain(idx, a.inverse(), g);
      if (!ch) continue;
      cf.ops.insert(cf.ops.begin(), op_h(detail::slice_of(tgt, 0, pos), a, g, detail::slice_of(rest, len, rest.size()), *ch));
      continue;
    }
    std::vector<Step> opts;
    for (std::size_t e = 0; e < C.count(1); ++e)
      for (bool r : {false, true})
        if (step_target(C, Step{e, r}) == src.start) opts.push_back({e, r});
    Step a = opts[pick(opts.size())];
    std::size_t len = kind == 0 ? 0 : pick(tgt.size() + 1);
    auto f = detail::slice_of(tgt, 0, len);
    auto ch = detail::find_chain(idx, a, f);
    if (!ch) continue;
    cf.ops.insert(cf.ops.begin(), op_g(a, f, detail::slice_of(tgt, len, tgt.size()), *ch));
  }
  return cf;
}

}  // namespace

TEST(Normalize, RandomFormsPutCapsOutermost) {
  std::mt19937 rng(3);
  std::set<std::string> seen;
  for (const auto& C : {standard_cube(2), standard_cube(3)}) {
    TileIndex idx(C);
    for (int t = 0; t < 400; ++t) {
      auto cf = random_form(C, idx, rng, 3 + t % 6);
      ASSERT_TRUE(well_typed(C, cf)) << to_sexpr(cf);
      std::vector<std::string> rules;
      auto n = normalize_canonical(C, cf, &rules);
      ASSERT_TRUE(well_typed(C, n)) << to_sexpr(cf) << " -> " << to_sexpr(n);
      EXPECT_EQ(cf_source(C, n), cf_source(C, cf));
      EXPECT_EQ(cf_target(C, n), cf_target(C, cf));
      bool outer = true;
      for (const auto& o : n.ops) {
        if (o.kind != K::H) outer = false;
        else EXPECT_TRUE(outer) << to_sexpr(n);
      }
      EXPECT_LE(n.count(K::H), cf.count(K::H));
      seen.insert(rules.begin(), rules.end());
    }
  }
  for (const char* r : {"cancel-cap", "exchange-cancel", "exchange-crossing", "strand-through-cap", "strand-past-cap"})
    EXPECT_TRUE(seen.count(r)) << r;
}
