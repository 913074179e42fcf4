#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "gathering/runner.hpp"

using namespace gathering;

namespace {

int run_command(const std::string& path, std::optional<std::uint64_t> max_rounds, const std::string& profile,
                const std::string& trace_path, const std::string& level, const std::string& mode) {
  Scenario s = load_scenario(path);
  RunConfig cfg;
  cfg.max_rounds = max_rounds;
  if (!profile.empty()) cfg.profile = profile;
  cfg.assert_mode = mode == "collect" ? AssertMode::Collect : AssertMode::FailFast;
  cfg.trace_level = level == "verdict" ? TraceLevel::Verdict : level == "memory" ? TraceLevel::Memory : TraceLevel::Tags;
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw ScenarioError("cannot write trace file " + trace_path);
    cfg.trace = &trace;
  }
  auto v = run_scenario(s, cfg);
  std::cout << format_verdict(v) << '\n';
  for (const auto& f : v.failures) std::cout << "assertion: " << f << '\n';
  return v.expected ? 0 : 1;
}

int sweep_command(const std::string& tmpl_path, const std::string& grid_path, const std::string& csv_path,
                  unsigned threads) {
  Scenario tmpl = load_scenario(tmpl_path);
  auto cells = load_grid(grid_path);
  auto rows = run_sweep(tmpl, cells, threads);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw ScenarioError("cannot write " + csv_path);
    out = &file;
  }
  write_csv(*out, rows);
  std::size_t failures = 0;
  for (const auto& r : rows) failures += r.expected ? 0 : 1;
  std::cerr << rows.size() << " cells, " << failures << " unexpected\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic gathering simulator"};
  app.require_subcommand(1);

  std::string scenario, profile, trace, level = "tags", mode = "fail-fast";
  std::optional<std::uint64_t> max_rounds;
  auto* run = app.add_subcommand("run", "Run one scenario and report its verdict");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--max-rounds", max_rounds, "Round horizon")->check(CLI::PositiveNumber);
  run->add_option("--profile", profile, "Constants profile")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--trace", trace, "Write the round trace to this file");
  run->add_option("--trace-level", level, "verdict, tags or memory")
      ->check(CLI::IsMember({"verdict", "tags", "memory"}));
  run->add_option("--assert", mode, "fail-fast or collect")->check(CLI::IsMember({"fail-fast", "collect"}));

  std::string tmpl, grid, csv;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario template over a parameter grid");
  sweep->add_option("template", tmpl, "Scenario template")->required();
  sweep->add_option("grid", grid, "Grid file")->required();
  sweep->add_option("--csv", csv, "Write the CSV summary here instead of stdout");
  sweep->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*run) return run_command(scenario, max_rounds, profile, trace, level, mode);
    return sweep_command(tmpl, grid, csv, threads);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
