#include <gtest/gtest.h>

#include <sstream>

#include "gathering/runner.hpp"

using namespace gathering;

namespace {

Scenario tmpl(const std::string& program) {
  std::istringstream in("graph ring 6\nprogram " + program + "\nplace 0 1 1\nplace 3 2 1\n");
  return parse_scenario(in);
}

std::vector<GridCell> grid(const std::string& text) {
  std::istringstream in(text);
  return parse_grid(in);
}

}  // namespace

TEST(Run, TimeoutAgainstGatherExpectation) {
  auto s = tmpl("hg");
  s.max_rounds = 5;
  auto v = run_scenario(s);
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Timeout);
  EXPECT_FALSE(v.expected);
  s.expect = Expectation::Never;
  EXPECT_TRUE(run_scenario(s).expected);
}

TEST(Run, TraceHeaderAndVerdict) {
  std::ostringstream out;
  RunConfig cfg;
  cfg.trace = &out;
  auto s = tmpl("dedicated");
  auto v = run_scenario(s, cfg);
  EXPECT_TRUE(v.expected);
  auto t = out.str();
  EXPECT_EQ(t.rfind("# scenario=" + scenario_hash(s) + " profile=desk advice=-\n", 0), 0u);
  EXPECT_NE(t.find("r=1 a=0 v=0 s=EXPLORING act=MOVE:"), std::string::npos);
  EXPECT_NE(t.find("verdict outcome=GATHERED"), std::string::npos);
}

TEST(Sweep, RowsSortedAndDeterministic) {
  auto cells = grid(
      "team=1,2 graph=ring:5 schedule=staggered:3\n"
      "team=1,1,2 graph=k2\n"
      "# comment\n"
      "team=1,1,2 graph=ring:6 schedule=never:0 seed=4\n");
  auto rows = run_sweep(tmpl("dedicated"), cells, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.key < b.key; }));
  std::size_t bad = 0;
  for (const auto& r : rows) bad += !r.expected;
  EXPECT_EQ(bad, 1u);  // three agents do not fit on K2
  std::ostringstream a, b;
  write_csv(a, rows);
  write_csv(b, run_sweep(tmpl("dedicated"), cells, 1));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "scenario_hash,team,n,schedule,profile,outcome,rounds_since_r0");
}

TEST(Sweep, EmptyGrid) {
  auto rows = run_sweep(tmpl("hg"), {}, 2);
  EXPECT_TRUE(rows.empty());
  std::ostringstream out;
  write_csv(out, rows);
  auto csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Sweep, MissedExpectationFailsItsRow) {
  auto cells = grid("team=1,2 graph=ring:4 program=hg\nteam=1,1,2 graph=ring:8 program=hg max_rounds=3\n");
  auto rows = run_sweep(tmpl("hg"), cells, 1);
  ASSERT_EQ(rows.size(), 2u);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.expected;
  EXPECT_EQ(failed, 1u);
}

TEST(Sweep, GridErrors) {
  EXPECT_THROW(grid("team=1,2 colour=red\n"), ScenarioError);
  EXPECT_THROW(grid("team\n"), ScenarioError);
}
