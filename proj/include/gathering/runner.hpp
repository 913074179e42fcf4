#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gathering/algorithms.hpp"
#include "gathering/engine.hpp"
#include "gathering/scenarios.hpp"

namespace gathering {

struct RunConfig {
  std::optional<std::uint64_t> max_rounds;
  std::optional<std::string> profile;
  std::ostream* trace = nullptr;
  TraceLevel trace_level = TraceLevel::Tags;
  AssertMode assert_mode = AssertMode::FailFast;
};

struct Verdict {
  Outcome outcome;
  bool expected = false;
  std::string scenario_hash;
  std::string profile;
  std::string advice;
  std::vector<std::string> failures;  // runtime invariant checks
  std::string error;                  // protocol error, if the run aborted
  std::optional<std::uint64_t> symmetry_violation;
};

std::string format_verdict(const Verdict& v);

// Program factory and advice bits a scenario asks for.
ProgramFactory make_factory(const Scenario& s, const ConstantsProfile& profile, std::string* advice_bits = nullptr);

// Runs a scenario with the HG monitor (for hg programs) and the symmetry
// monitor (when the scenario declares one); extra observers are attached too.
Verdict run_scenario(const Scenario& s, const RunConfig& config = {}, const std::vector<RoundObserver*>& extra = {});

// --- sweeps ---------------------------------------------------------------------

// One grid line: whitespace-separated key=value cells (team, graph, schedule,
// profile, seed, expect, program, max_rounds).
struct GridCell {
  std::map<std::string, std::string> values;
  std::string key() const;
};
std::vector<GridCell> parse_grid(std::istream& in);
std::vector<GridCell> load_grid(const std::string& path);

Scenario instantiate(const Scenario& tmpl, const GridCell& cell);

struct SweepRow {
  std::string key;
  std::string scenario_hash;
  std::string team;
  std::size_t n = 0;
  std::string schedule;
  std::string profile;
  std::string outcome;
  std::uint64_t rounds_since_r0 = 0;
  bool expected = false;
};

std::vector<SweepRow> run_sweep(const Scenario& tmpl, const std::vector<GridCell>& cells, unsigned threads = 0);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace gathering
