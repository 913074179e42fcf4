#include "gathering/runner.hpp"

#include <algorithm>
#include <atomic>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace gathering {

std::string format_verdict(const Verdict& v) {
  std::ostringstream out;
  out << "verdict outcome=" << outcome_name(v.outcome.kind) << " round=" << v.outcome.round;
  if (v.outcome.kind == Outcome::Kind::Gathered) out << " node=" << v.outcome.node;
  out << " rounds_since_r0=" << v.outcome.rounds_since_r0() << " assertions=" << v.failures.size();
  if (v.symmetry_violation) out << " symmetry_violation=" << *v.symmetry_violation;
  if (!v.error.empty()) out << " error=\"" << v.error << '"';
  out << " expected=" << (v.expected ? "yes" : "no");
  return out.str();
}

ProgramFactory make_factory(const Scenario& s, const ConstantsProfile& profile, std::string* advice_bits) {
  if (advice_bits) advice_bits->clear();
  if (s.program == "dedicated") {
    auto team = s.dedicated_team.empty() ? s.team() : s.dedicated_team;
    return dedicated_factory(team, s.graph->node_count(), profile);
  }
  if (s.program == "hg_plus") return hg_plus_factory(profile);
  if (s.program == "hg") {
    std::string bits = s.advice == "oracle" ? oracle_advice(s.team()) : s.advice == "none" ? "" : s.advice;
    if (advice_bits) *advice_bits = bits;
    return hg_factory(parse_advice(bits), profile);
  }
  throw ScenarioError("unknown program '" + s.program + "'");
}

Verdict run_scenario(const Scenario& s, const RunConfig& config, const std::vector<RoundObserver*>& extra) {
  s.validate();
  Verdict v;
  v.scenario_hash = scenario_hash(s);
  v.profile = config.profile.value_or(s.profile);
  auto profile = profile_by_name(v.profile);
  auto factory = make_factory(s, profile, &v.advice);
  if (config.trace)
    *config.trace << "# scenario=" << v.scenario_hash << " profile=" << v.profile
                  << " advice=" << (v.advice.empty() ? "-" : v.advice) << '\n';

  WorldOptions opts;
  opts.trace = config.trace;
  opts.trace_level = config.trace_level;
  opts.assert_mode = config.assert_mode;
  World world(s.graph, s.agents(), factory, opts);
  std::optional<HgMonitor> hg;
  if (s.program != "dedicated") {
    hg.emplace(world.assertions());
    world.add_observer(&*hg);
  }
  std::optional<SymmetryMonitor> sym;
  if (s.symmetry_period) {
    sym.emplace(*s.symmetry_period);
    world.add_observer(&*sym);
  }
  for (auto* o : extra) world.add_observer(o);

  const std::uint64_t max_rounds = config.max_rounds.value_or(s.max_rounds);
  try {
    v.outcome = world.run(max_rounds);
  } catch (const AssertionFailure& e) {
    v.error = e.what();
  } catch (const ProtocolError& e) {
    v.error = e.what();
  }
  if (!v.error.empty()) {
    v.outcome.kind = Outcome::Kind::Timeout;
    v.outcome.round = world.round() - 1;
    v.outcome.r0 = world.r0().value_or(0);
  }
  v.failures = world.assertions().failures();
  if (sym) v.symmetry_violation = sym->violation_round();
  const bool clean = v.error.empty() && v.failures.empty() && !v.symmetry_violation;
  // NEVER holds for any run that does not gather: a timeout, or agents
  // declaring termination apart.
  const bool gathered = v.error.empty() && v.outcome.kind == Outcome::Kind::Gathered;
  v.expected = clean && (s.expect == Expectation::Gather) == gathered;
  if (config.trace) *config.trace << format_verdict(v) << '\n';
  return v;
}

// --- sweeps ----------------------------------------------------------------------

std::string GridCell::key() const {
  std::string k;
  for (const auto& [name, value] : values) k += (k.empty() ? "" : " ") + name + "=" + value;
  return k;
}

std::vector<GridCell> parse_grid(std::istream& in) {
  static const std::vector<std::string> known{"team",    "graph",  "schedule",   "profile",
                                              "seed",    "expect", "max_rounds", "program"};
  std::vector<GridCell> cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    GridCell c;
    for (std::string tok; ls >> tok;) {
      auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ScenarioError("grid line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
      auto name = tok.substr(0, eq);
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ScenarioError("grid line " + std::to_string(lineno) + ": unknown key '" + name + "'");
      c.values[name] = tok.substr(eq + 1);
    }
    if (!c.values.empty()) cells.push_back(std::move(c));
  }
  return cells;
}

std::vector<GridCell> load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open grid file " + path);
  return parse_grid(in);
}

namespace {

std::string value_or(const GridCell& c, const std::string& key, const std::string& fallback) {
  auto it = c.values.find(key);
  return it == c.values.end() ? fallback : it->second;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ScenarioError("expected a non-negative integer for " + what + ", got '" + s + "'");
  return std::stoull(s);
}

}  // namespace

Scenario instantiate(const Scenario& tmpl, const GridCell& cell) {
  Scenario s = tmpl;
  if (auto g = cell.values.find("graph"); g != cell.values.end()) {
    auto spec = g->second;
    std::replace(spec.begin(), spec.end(), ':', ' ');
    s.graph = graph_from_spec(spec);
    s.graph_spec = spec;
  }
  s.program = value_or(cell, "program", s.program);
  s.profile = value_or(cell, "profile", s.profile);
  if (cell.values.count("seed")) s.seed = parse_u64(cell.values.at("seed"), "seed");
  if (cell.values.count("max_rounds")) s.max_rounds = parse_u64(cell.values.at("max_rounds"), "max_rounds");
  if (cell.values.count("expect")) {
    auto e = cell.values.at("expect");
    if (e == "GATHER") s.expect = Expectation::Gather;
    else if (e == "NEVER") s.expect = Expectation::Never;
    else throw ScenarioError("expect takes GATHER or NEVER");
  }
  if (cell.values.count("team") || cell.values.count("schedule") || cell.values.count("graph")) {
    std::vector<Label> team = tmpl.team();
    if (auto t = cell.values.find("team"); t != cell.values.end()) {
      team.clear();
      std::istringstream in(t->second);
      for (std::string l; std::getline(in, l, ',');) team.push_back(parse_u64(l, "label"));
    }
    if (!s.graph) throw ScenarioError("grid cell without a graph");
    if (team.size() > s.graph->node_count()) throw ScenarioError("more agents than nodes");
    auto wake = wake_rounds(Schedule::parse(value_or(cell, "schedule", "all")), team.size());
    std::vector<Node> nodes(s.graph->node_count());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<Node>(i);
    boost::random::mt19937_64 rng(s.seed);
    for (std::size_t i = nodes.size(); i > 1; --i) {
      boost::random::uniform_int_distribution<std::size_t> d(0, i - 1);
      std::swap(nodes[i - 1], nodes[d(rng)]);
    }
    s.placements.clear();
    for (std::size_t i = 0; i < team.size(); ++i) s.placements.push_back({nodes[i], team[i], wake[i]});
  }
  s.validate();
  return s;
}

std::vector<SweepRow> run_sweep(const Scenario& tmpl, const std::vector<GridCell>& cells, unsigned threads) {
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < cells.size();) {
      auto& row = rows[i];
      const auto& c = cells[i];
      row.key = c.key();
      row.team = value_or(c, "team", "");
      std::replace(row.team.begin(), row.team.end(), ',', ' ');
      row.schedule = value_or(c, "schedule", "all");
      row.profile = value_or(c, "profile", tmpl.profile);
      try {
        auto s = instantiate(tmpl, c);
        if (row.team.empty())
          for (auto l : s.team()) row.team += (row.team.empty() ? "" : " ") + std::to_string(l);
        row.n = s.graph->node_count();
        auto v = run_scenario(s);
        row.scenario_hash = v.scenario_hash;
        row.outcome = v.error.empty() ? outcome_name(v.outcome.kind) : "ERROR";
        if (!v.failures.empty() || v.symmetry_violation) row.outcome = "ASSERTION";
        row.rounds_since_r0 = v.outcome.rounds_since_r0();
        row.expected = v.expected;
      } catch (const std::exception& e) {
        row.outcome = "ERROR";
        row.expected = false;
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.key < b.key; });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "scenario_hash,team,n,schedule,profile,outcome,rounds_since_r0\n";
  for (const auto& r : rows)
    out << r.scenario_hash << ',' << r.team << ',' << r.n << ',' << r.schedule << ',' << r.profile << ','
        << r.outcome << ',' << r.rounds_since_r0 << '\n';
}

}  // namespace gathering
