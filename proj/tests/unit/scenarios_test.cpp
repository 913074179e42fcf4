#include <gtest/gtest.h>

#include <boost/random/mersenne_twister.hpp>
#include <sstream>

#include "gathering/scenarios.hpp"
#include "test_programs.hpp"

using namespace gathering;

TEST(Team, Indices) {
  auto a = indices({1, 1, 1, 1, 2, 2});
  EXPECT_EQ(a.k, 6u);
  EXPECT_EQ(a.sigma, 2u);
  EXPECT_EQ(a.mu, 4u);
  auto b = indices({1, 2});
  EXPECT_EQ(b.sigma, 1u);
  EXPECT_EQ(b.mu, 1u);
  auto c = indices({5, 5, 7, 7, 7, 7});
  EXPECT_EQ(c.sigma, 2u);
  EXPECT_EQ(c.mu, 4u);
  EXPECT_EQ(c.lambda, 5u);
}

TEST(Team, IndicesAgreeWithBruteForce) {
  boost::random::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Label> team(1 + rng() % 12);
    for (auto& l : team) l = 1 + rng() % 4;
    std::uint64_t mu = 0, sigma = 0;
    for (Label l = 1; l <= 4; ++l) {
      std::uint64_t c = 0;
      for (auto x : team) c += x == l;
      if (!c) continue;
      mu = std::max(mu, c);
      // Euclid by subtraction.
      std::uint64_t a = sigma, b = c;
      while (a && b) (a > b ? a -= b : b -= a);
      sigma = a + b;
    }
    auto ix = indices(team);
    ASSERT_EQ(ix.mu, mu);
    ASSERT_EQ(ix.sigma, sigma);
  }
}

TEST(Team, Gatherable) {
  EXPECT_TRUE(gatherable({1, 1, 2}));
  EXPECT_FALSE(gatherable({1, 1, 2, 2}));
  EXPECT_TRUE(gatherable({9}));
}

TEST(SymmetricRing, TwelveRingLayout) {
  auto s = symmetric_ring_scenario({1, 1, 1, 1, 2, 2});
  EXPECT_EQ(s.graph->node_count(), 12u);
  std::vector<std::pair<Node, Label>> got;
  for (const auto& p : s.placements) {
    got.emplace_back(p.node, p.label);
    EXPECT_EQ(p.wake, 1u);
  }
  std::sort(got.begin(), got.end());
  std::vector<std::pair<Node, Label>> want{{0, 1}, {2, 1}, {4, 2}, {6, 1}, {8, 1}, {10, 2}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(s.symmetry_period, 6u);
}

TEST(SymmetricRing, WindowsAndOccupancy) {
  std::vector<std::vector<Label>> teams{{1, 1, 2, 2}, {1, 1, 1, 1, 2, 2}, {3, 3, 3, 5, 5, 5}, {5, 5, 7, 7, 7, 7},
                                        {1, 1, 2, 2, 3, 3, 4, 4}, {2, 2, 2, 2}};
  for (const auto& team : teams)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto s = symmetric_ring_scenario(team, seed);
      auto ix = indices(team);
      auto placed = s.team();
      std::sort(placed.begin(), placed.end());
      auto want = team;
      std::sort(want.begin(), want.end());
      EXPECT_EQ(placed, want);
      const std::size_t n = s.graph->node_count();
      ASSERT_EQ(n, ix.k * ix.sigma);
      std::vector<Label> at(n, 0);
      for (const auto& p : s.placements) at[p.node] = p.label;
      for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(at[v] != 0, v % ix.sigma == 0);
      // Each window of k consecutive nodes holds m(l)/sigma agents of label l.
      for (std::size_t start = 0; start < n; ++start) {
        std::map<Label, std::uint64_t> cnt;
        for (std::size_t i = 0; i < ix.k; ++i)
          if (auto l = at[(start + i) % n]) ++cnt[l];
        for (const auto& [l, c] : multiplicities(team)) EXPECT_EQ(cnt[l], c / ix.sigma);
      }
    }
  EXPECT_THROW(symmetric_ring_scenario({1, 2}), ScenarioError);
}

TEST(SymmetryMonitor, FlagsBrokenSnapshot) {
  auto s = symmetric_ring_scenario({1, 1, 2, 2});
  World w(s.graph, s.agents(), gathering::testing::waiting());
  SymmetryMonitor mon(4);
  for (int r = 0; r < 4; ++r) {
    w.step();
    std::vector<std::pair<Node, Memory>> snap;
    for (const auto& a : w.agents()) snap.emplace_back(a.node, a.memory);
    mon.check(w.round() - 1, 8, snap);
  }
  EXPECT_TRUE(mon.ok());
  w.step();
  std::vector<std::pair<Node, Memory>> snap;
  for (const auto& a : w.agents()) snap.emplace_back(a.node, a.memory);
  snap[0].second = Memory::leaf(99);
  mon.check(w.round() - 1, 8, snap);
  EXPECT_FALSE(mon.ok());
  EXPECT_EQ(mon.violation_round(), 5u);
}

TEST(Words, SecondWord) {
  auto w = word_family(1, 1, 100);
  ASSERT_GE(w.size(), 2u);
  Word want;
  for (int i = 0; i < 4; ++i) want.insert(want.end(), {1, 1, 2});
  want.push_back(3);
  EXPECT_EQ(w[1], want);
}

TEST(Words, RecurrenceAndClaims) {
  for (auto [b, d] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 1}, {1, 2}, {2, 1}}) {
    auto words = word_family(b, d, 100000);
    ASSERT_GE(words.size(), 2u);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      std::uint64_t len = words[i].size(), pow = 1;
      for (std::uint64_t e = 0; e < d; ++e) pow *= len;
      EXPECT_EQ(words[i + 1].size(), 4 * b * pow + 1);
    }
    for (const auto& w : words) {
      EXPECT_TRUE(gatherable(w));
      EXPECT_EQ(indices(w).lambda, 1u);
    }
  }
}

TEST(Words, ScenarioPlacesLetters) {
  auto s = word_scenario({1, 1, 2});
  EXPECT_EQ(s.graph->node_count(), 3u);
  EXPECT_EQ(s.placements[2].node, 2u);
  EXPECT_EQ(s.placements[2].label, 2u);
  EXPECT_NO_THROW(s.validate());
}

TEST(Schedules, Kinds) {
  using W = std::vector<std::optional<std::uint64_t>>;
  EXPECT_EQ(wake_rounds(Schedule::parse("all"), 3), (W{1, 1, 1}));
  EXPECT_EQ(wake_rounds(Schedule::parse("staggered:5"), 3), (W{1, 6, 11}));
  EXPECT_EQ(wake_rounds(Schedule::parse("never:1"), 3), (W{std::nullopt, 1, std::nullopt}));
  EXPECT_THROW(wake_rounds(Schedule::parse("never:"), 3), ScenarioError);
  auto r = wake_rounds(Schedule::parse("random:4:10"), 5);
  EXPECT_EQ(r, wake_rounds(Schedule::parse("random:4:10"), 5));
  for (auto x : r) EXPECT_TRUE(x && *x >= 1 && *x <= 11);
  EXPECT_EQ(Schedule::parse("staggered:5").to_string(), "staggered:5");
  EXPECT_THROW(Schedule::parse("sometimes"), ScenarioError);
}

TEST(ScenarioFile, RoundTripAndHash) {
  std::istringstream in(
      "# demo\n"
      "graph ring 5\nprogram dedicated\nprofile desk\nseed 3\nexpect GATHER\nmax_rounds 900\n"
      "place 0 1 1\nplace 2 2 never\n");
  auto s = parse_scenario(in);
  EXPECT_EQ(s.graph->node_count(), 5u);
  EXPECT_EQ(s.placements[1].wake, std::nullopt);
  std::istringstream again(serialize_scenario(s));
  auto t = parse_scenario(again);
  EXPECT_EQ(serialize_scenario(t), serialize_scenario(s));
  EXPECT_EQ(scenario_hash(t), scenario_hash(s));
  EXPECT_EQ(scenario_hash(s).size(), 16u);
  t.seed = 4;
  EXPECT_NE(scenario_hash(t), scenario_hash(s));
}

TEST(ScenarioFile, InlineGraph) {
  std::istringstream in("graph inline\n2 1\n0 0 1 0\nend\nplace 0 1 1\nplace 1 2 1\n");
  auto s = parse_scenario(in);
  EXPECT_EQ(*s.graph, build_k2());
  std::istringstream again(serialize_scenario(s));
  EXPECT_EQ(*parse_scenario(again).graph, build_k2());
}

TEST(ScenarioFile, ErrorsCiteLines) {
  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_scenario(in);
    } catch (const ScenarioError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(error_of("graph k2\nplace 0 1 1\nbogus 3\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("graph k2\nplace 0 x 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("graph ring 4\nplace 0 1 1\n").find("two agents"), std::string::npos);
  EXPECT_NE(error_of("graph ring 4\nplace 0 1 never\nplace 1 2 never\n").find("woken"), std::string::npos);
  EXPECT_NE(error_of("graph ring 4\nplace 0 1 1\nplace 0 2 1\n").find("node 0"), std::string::npos);
  EXPECT_FALSE(error_of("place 0 1 1\n").empty());
}
