#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gathering/algorithms.hpp"
#include "gathering/runner.hpp"
#include "test_programs.hpp"

using namespace gathering;

namespace {

Scenario make(const std::string& graph, const std::string& program,
              std::vector<std::tuple<Node, Label, std::optional<std::uint64_t>>> places) {
  Scenario s;
  s.graph_spec = graph;
  s.graph = graph_from_spec(graph);
  s.program = program;
  for (auto& [v, l, w] : places) s.placements.push_back({v, l, w});
  return s;
}

// Independent oracle: square from 2 until mu + 1 fits.
BigInt smallest_tower(std::uint64_t mu) {
  BigInt u = 2;
  while (u < BigInt(mu) + 1) u = u * u;
  return u;
}

}  // namespace

TEST(Oracle, Examples) {
  EXPECT_EQ(oracle_x(1), 0u);
  EXPECT_EQ(parse_advice(oracle_advice({1, 2})).U, 2);
  EXPECT_EQ(oracle_x(3), 1u);
  EXPECT_EQ(parse_advice(oracle_advice({4, 4, 4})).U, 4);
  EXPECT_EQ(oracle_x(255), 3u);
  EXPECT_EQ(oracle_advice(std::vector<Label>(255, 9)), "11");
  EXPECT_EQ(parse_advice("11").U, 256);
  EXPECT_EQ(parse_advice("").U, 2);
}

TEST(Oracle, BoundsAgainstIndependentComputation) {
  for (std::uint64_t mu = 1; mu <= 100000; mu += (mu < 1000 ? 1 : 97)) {
    std::uint64_t x = oracle_x(mu);
    BigInt u = BigInt(1) << (std::size_t{1} << x);
    ASSERT_EQ(u, smallest_tower(mu)) << mu;
    ASSERT_LE(BigInt(mu), u);
    ASSERT_LE(u, BigInt(mu + 1) * (mu + 1));
  }
}

TEST(Explorer, WaitExponent) {
  // eta=5, U=2, tau=7: beta*log2(70) = 12.26, so 11 * 13 terms at scale 1.
  EXPECT_EQ(wait_exponent(5, 2, 7, paper_profile()), 143u);
  EXPECT_EQ(wait_exponent(5, 2, 7, desk_profile()), 4u);  // ceil(143 / 44)
  // Exact powers of two: X = 16, beta * log2 X = 8.
  EXPECT_EQ(wait_exponent(2, 2, 4, paper_profile()), 88u);
  EXPECT_EQ(wait_rounds(2, 2, 4, desk_profile()), 2 + 4);
  for (std::uint64_t eta = 1; eta <= 12; ++eta)
    for (std::uint64_t tau = 1; tau <= 300; tau += 7) {
      double exact = 11 * std::ceil(2 * std::log2(static_cast<double>(eta * 4 * tau)) - 1e-9);
      EXPECT_EQ(wait_exponent(eta, 4, tau, paper_profile()), static_cast<std::uint64_t>(exact));
    }
}

TEST(Explorer, RepeatThreshold) {
  EXPECT_EQ(repeat_threshold(2, desk_profile()), 2);
  EXPECT_EQ(repeat_threshold(4, desk_profile()), 4);
  EXPECT_EQ(repeat_threshold(2, paper_profile()), BigInt(1) << 50);
  auto p = desk_profile();
  p.repeat_exponent_scale = Rational(1, 100);  // U^(1/2)
  EXPECT_EQ(repeat_threshold(16, p), 4);
  EXPECT_EQ(repeat_threshold(2, p), 2);  // ceil(sqrt 2)
}

TEST(Dedicated, MultisubsetRank) {
  std::vector<Label> team{1, 1, 2};
  EXPECT_EQ(multisubset_rank(team, {}), 1u);
  EXPECT_EQ(multisubset_rank(team, {1}), 2u);
  EXPECT_EQ(multisubset_rank(team, {2}), 3u);
  EXPECT_EQ(multisubset_rank(team, {1, 1}), 4u);
  EXPECT_EQ(multisubset_rank(team, {2, 1}), 5u);
  EXPECT_EQ(multisubset_rank(team, {1, 2, 1}), 6u);
  EXPECT_THROW(multisubset_rank(team, {2, 2}), ProtocolError);
}

TEST(Dedicated, GathersOnK2) {
  auto v = run_scenario(make("k2", "dedicated", {{0, 1, 1}, {1, 2, 1}}));
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Gathered);
  EXPECT_TRUE(v.expected);
}

TEST(Dedicated, GathersHomonymsWithStaggeredWakeUps) {
  auto v = run_scenario(make("ring 6", "dedicated", {{0, 1, 1}, {2, 1, 6}, {4, 2, 11}}));
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Gathered);
}

TEST(Dedicated, RejectsSymmetricTeams) {
  EXPECT_THROW(DedicatedProgram(1, {1, 1}, 4, desk_profile()), std::invalid_argument);
  EXPECT_THROW(dedicated_factory({1, 1, 2, 2}, 4, desk_profile()), std::invalid_argument);
}

TEST(Hg, GathersOnK2) {
  auto v = run_scenario(make("k2", "hg", {{0, 1, 1}, {1, 2, 1}}));
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Gathered);
  EXPECT_TRUE(v.failures.empty());
  EXPECT_TRUE(v.error.empty()) << v.error;
}

TEST(Hg, GathersHomonymsOnRing) {
  auto v = run_scenario(make("ring 6", "hg", {{0, 1, 1}, {2, 1, 1}, {4, 2, 1}}));
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Gathered) << v.error;
}

TEST(Hg, SymmetricRingNeverGathers) {
  auto s = symmetric_ring_scenario({1, 1, 1, 1, 2, 2});
  auto v = run_scenario(s);
  EXPECT_NE(v.outcome.kind, Outcome::Kind::Gathered);
  EXPECT_FALSE(v.symmetry_violation.has_value());
  EXPECT_TRUE(v.expected);
}

TEST(HgPlus, GathersDistinctLabels) {
  auto v = run_scenario(make("random 5 6 4", "hg_plus", {{0, 3, 1}, {3, 7, 1}}));
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Gathered) << v.error;
  auto w = run_scenario(make("random 8 11 2", "hg_plus", {{0, 1, 1}, {2, 2, 4}, {5, 4, 9}, {7, 8, std::nullopt}}));
  EXPECT_EQ(w.outcome.kind, Outcome::Kind::Gathered) << w.error;
}

TEST(HgPlus, MatchesHgWithOracleAdvice) {
  auto body = [](const Scenario& s) {
    std::ostringstream out;
    RunConfig cfg;
    cfg.trace = &out;
    cfg.trace_level = TraceLevel::Memory;
    run_scenario(s, cfg);
    auto t = out.str();
    return t.substr(t.find('\n') + 1);
  };
  auto a = make("random 6 8 3", "hg", {{0, 2, 1}, {4, 5, 3}, {5, 1, 1}});
  auto b = a;
  b.program = "hg_plus";
  EXPECT_EQ(body(a), body(b));
}

namespace {

RoundEvent ev(std::size_t sim, Node v, StateTag tag, std::optional<StateTag> transit = std::nullopt) {
  RoundEvent e{1, sim, v, tag, {}, {}, Memory::leaf(sim + 1), -1};
  e.decision.transit = transit;
  return e;
}

}  // namespace

TEST(HgMonitor, DetectsTwoTokensAtOneNode) {
  World w(std::make_shared<PortGraph>(build_k2()), {{0, 1, 1}, {1, 2, 1}}, gathering::testing::waiting());
  w.step();
  Assertions sink(AssertMode::Collect);
  HgMonitor m(sink);
  m.on_round(w, {ev(0, 0, StateTag::Cruiser, StateTag::Token), ev(1, 0, StateTag::Cruiser, StateTag::Explorer)});
  EXPECT_TRUE(sink.failures().empty());
  m.on_round(w, {ev(0, 0, StateTag::Token), ev(1, 0, StateTag::Explorer), ev(2, 0, StateTag::Token)});
  EXPECT_FALSE(sink.failures().empty());
}

TEST(HgMonitor, DetectsStateReentry) {
  World w(std::make_shared<PortGraph>(build_k2()), {{0, 1, 1}, {1, 2, 1}}, gathering::testing::waiting());
  w.step();
  Assertions sink(AssertMode::Collect);
  HgMonitor m(sink);
  m.on_round(w, {ev(0, 0, StateTag::Cruiser)});
  m.on_round(w, {ev(0, 0, StateTag::Searcher)});
  EXPECT_TRUE(sink.failures().empty());
  m.on_round(w, {ev(0, 0, StateTag::Cruiser)});
  EXPECT_EQ(sink.failures().size(), 1u);
}

TEST(HgMonitor, DetectsUnpairedToken) {
  World w(std::make_shared<PortGraph>(build_k2()), {{0, 1, 1}, {1, 2, 1}}, gathering::testing::waiting());
  w.step();
  Assertions sink(AssertMode::Collect);
  HgMonitor m(sink);
  m.on_round(w, {ev(0, 0, StateTag::Cruiser, StateTag::Token), ev(1, 0, StateTag::Cruiser, StateTag::Shadow)});
  EXPECT_FALSE(sink.failures().empty());
}
