#include "gathering/scenarios.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace gathering {

std::map<Label, std::uint64_t> multiplicities(const std::vector<Label>& team) {
  std::map<Label, std::uint64_t> m;
  for (auto l : team) ++m[l];
  return m;
}

TeamIndices indices(const std::vector<Label>& team) {
  if (team.empty()) throw std::invalid_argument("empty team");
  TeamIndices t;
  t.k = team.size();
  t.lambda = *std::min_element(team.begin(), team.end());
  for (const auto& [l, c] : multiplicities(team)) {
    t.sigma = std::gcd(t.sigma, c);
    t.mu = std::max(t.mu, c);
  }
  return t;
}

bool gatherable(const std::vector<Label>& team) { return indices(team).sigma == 1; }

// --- schedules -----------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ScenarioError("expected a non-negative integer for " + what + ", got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ScenarioError(what + " out of range: " + s);
  }
}

template <class Rng>
void shuffle(std::vector<Label>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> d(0, i - 1);
    std::swap(v[i - 1], v[d(rng)]);
  }
}

}  // namespace

Schedule Schedule::parse(const std::string& text) {
  auto parts = split(text, ':');
  Schedule s;
  if (parts.empty()) throw ScenarioError("empty schedule");
  if (parts[0] == "all" && parts.size() == 1) return s;
  if (parts[0] == "staggered" && parts.size() == 2) {
    s.kind = Kind::Staggered;
    s.delta = to_u64(parts[1], "stagger delay");
    return s;
  }
  if (parts[0] == "never" && parts.size() == 2) {
    s.kind = Kind::SubsetNever;
    for (const auto& i : split(parts[1], ',')) s.woken.push_back(to_u64(i, "woken agent index"));
    return s;
  }
  if (parts[0] == "random" && parts.size() == 3) {
    s.kind = Kind::Random;
    s.seed = to_u64(parts[1], "schedule seed");
    s.max_delay = to_u64(parts[2], "maximum delay");
    return s;
  }
  throw ScenarioError("unknown schedule '" + text + "'");
}

std::string Schedule::to_string() const {
  switch (kind) {
    case Kind::AllAt1: return "all";
    case Kind::Staggered: return "staggered:" + std::to_string(delta);
    case Kind::SubsetNever: {
      std::string s = "never:";
      for (std::size_t i = 0; i < woken.size(); ++i) s += (i ? "," : "") + std::to_string(woken[i]);
      return s;
    }
    case Kind::Random: return "random:" + std::to_string(seed) + ":" + std::to_string(max_delay);
  }
  return "?";
}

std::vector<std::optional<std::uint64_t>> wake_rounds(const Schedule& s, std::size_t k) {
  std::vector<std::optional<std::uint64_t>> out(k);
  switch (s.kind) {
    case Schedule::Kind::AllAt1:
      for (auto& w : out) w = 1;
      break;
    case Schedule::Kind::Staggered:
      for (std::size_t i = 0; i < k; ++i) out[i] = 1 + i * s.delta;
      break;
    case Schedule::Kind::SubsetNever:
      for (auto i : s.woken) {
        if (i >= k) throw ScenarioError("woken agent index " + std::to_string(i) + " out of range");
        out[i] = 1;
      }
      break;
    case Schedule::Kind::Random: {
      boost::random::mt19937_64 rng(s.seed);
      boost::random::uniform_int_distribution<std::uint64_t> d(1, 1 + s.max_delay);
      for (auto& w : out) w = d(rng);
      break;
    }
  }
  if (std::none_of(out.begin(), out.end(), [](const auto& w) { return w.has_value(); }))
    throw ScenarioError("no agent is ever woken by the adversary");
  return out;
}

// --- scenarios -------------------------------------------------------------------

std::vector<Label> Scenario::team() const {
  std::vector<Label> t;
  for (const auto& p : placements) t.push_back(p.label);
  return t;
}

std::vector<AgentSpec> Scenario::agents() const {
  std::vector<AgentSpec> out;
  for (const auto& p : placements) out.push_back({p.node, p.label, p.wake});
  return out;
}

void Scenario::validate() const {
  if (!graph) throw ScenarioError("scenario has no graph");
  if (placements.size() < 2) throw ScenarioError("a team needs at least two agents");
  std::vector<bool> used(graph->node_count(), false);
  bool any_woken = false;
  for (const auto& p : placements) {
    if (p.node >= graph->node_count()) throw ScenarioError("placement on node " + std::to_string(p.node) + " outside the graph");
    if (used[p.node]) throw ScenarioError("two agents placed on node " + std::to_string(p.node));
    used[p.node] = true;
    if (p.label == 0) throw ScenarioError("labels are positive integers");
    if (p.wake && *p.wake == 0) throw ScenarioError("wake rounds start at 1");
    any_woken = any_woken || p.wake.has_value();
  }
  if (!any_woken) throw ScenarioError("no agent is ever woken by the adversary");
  if (program != "dedicated" && program != "hg" && program != "hg_plus")
    throw ScenarioError("unknown program '" + program + "'");
  if (profile != "desk" && profile != "paper") throw ScenarioError("unknown profile '" + profile + "'");
  if (advice != "oracle" && advice != "none" &&
      (advice.empty() || advice.find_first_not_of("01") != std::string::npos))
    throw ScenarioError("advice must be oracle, none or a bit string");
  if (max_rounds == 0) throw ScenarioError("max_rounds must be at least 1");
  if (symmetry_period && (*symmetry_period == 0 || graph->node_count() % *symmetry_period != 0))
    throw ScenarioError("symmetry period must divide the ring size");
  for (auto l : dedicated_team)
    if (l == 0) throw ScenarioError("labels are positive integers");
}

std::shared_ptr<const PortGraph> graph_from_spec(const std::string& spec) {
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  std::vector<std::uint64_t> args;
  std::string tok;
  while (in >> tok) args.push_back(to_u64(tok, "graph parameter"));
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw ScenarioError("graph " + kind + " takes " + std::to_string(n) + " parameter(s)");
  };
  try {
    if (kind == "ring") {
      need(1);
      return std::make_shared<PortGraph>(build_ring(args[0]));
    }
    if (kind == "k2") {
      need(0);
      return std::make_shared<PortGraph>(build_k2());
    }
    if (kind == "path") {
      need(1);
      return std::make_shared<PortGraph>(build_path(args[0]));
    }
    if (kind == "star") {
      need(1);
      return std::make_shared<PortGraph>(build_star(args[0]));
    }
    if (kind == "complete") {
      need(1);
      return std::make_shared<PortGraph>(build_complete(args[0]));
    }
    if (kind == "random") {
      need(3);
      return std::make_shared<PortGraph>(random_connected(args[0], args[1], args[2]));
    }
  } catch (const GraphError& e) {
    throw ScenarioError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  throw ScenarioError("unknown graph kind '" + kind + "'");
}

Scenario parse_scenario(std::istream& in, const std::string& base_dir) {
  Scenario s;
  bool have_graph = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> ScenarioError {
    return ScenarioError("line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const auto& key = tok[0];
    try {
      if (key == "graph") {
        if (have_graph) throw fail("graph given twice");
        if (tok.size() < 2) throw fail("graph needs a kind");
        have_graph = true;
        if (tok[1] == "inline") {
          std::ostringstream body;
          bool closed = false;
          while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t") != std::string::npos &&
                line.substr(line.find_first_not_of(" \t"), 3) == "end") {
              closed = true;
              break;
            }
            body << line << '\n';
          }
          if (!closed) throw fail("inline graph without 'end'");
          std::istringstream gin(body.str());
          s.graph = std::make_shared<PortGraph>(parse_graph(gin));
          s.graph_spec = "inline";
        } else if (tok[1] == "file") {
          if (tok.size() != 3) throw fail("graph file takes one path");
          std::filesystem::path p(tok[2]);
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          s.graph = std::make_shared<PortGraph>(load_graph(p.string()));
          s.graph_spec = "inline";
        } else {
          std::string spec;
          for (std::size_t i = 1; i < tok.size(); ++i) spec += (i > 1 ? " " : "") + tok[i];
          s.graph = graph_from_spec(spec);
          s.graph_spec = spec;
        }
      } else if (key == "place") {
        if (tok.size() != 4) throw fail("place takes: node label wake|never");
        Placement p;
        p.node = static_cast<Node>(to_u64(tok[1], "node"));
        p.label = to_u64(tok[2], "label");
        if (tok[3] != "never") p.wake = to_u64(tok[3], "wake round");
        s.placements.push_back(p);
      } else if (key == "program" && tok.size() == 2) {
        s.program = tok[1];
      } else if (key == "profile" && tok.size() == 2) {
        s.profile = tok[1];
      } else if (key == "seed" && tok.size() == 2) {
        s.seed = to_u64(tok[1], "seed");
      } else if (key == "expect" && tok.size() == 2) {
        if (tok[1] == "GATHER") s.expect = Expectation::Gather;
        else if (tok[1] == "NEVER") s.expect = Expectation::Never;
        else throw fail("expect takes GATHER or NEVER");
      } else if (key == "max_rounds" && tok.size() == 2) {
        s.max_rounds = to_u64(tok[1], "max_rounds");
      } else if (key == "advice" && tok.size() == 2) {
        s.advice = tok[1];
      } else if (key == "dedicated_team" && tok.size() >= 2) {
        s.dedicated_team.clear();
        for (std::size_t i = 1; i < tok.size(); ++i) s.dedicated_team.push_back(to_u64(tok[i], "label"));
      } else if (key == "monitor" && tok.size() == 3 && tok[1] == "symmetry") {
        s.symmetry_period = to_u64(tok[2], "symmetry period");
      } else {
        throw fail("unrecognized line '" + line + "'");
      }
    } catch (const ScenarioError& e) {
      std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw fail(msg);
    } catch (const GraphError& e) {
      throw fail(e.what());
    }
  }
  if (!have_graph) throw ScenarioError("scenario has no graph line");
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  try {
    return parse_scenario(in, std::filesystem::path(path).parent_path().string());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  if (s.graph_spec == "inline" || s.graph_spec.empty())
    out << "graph inline\n" << serialize_graph(*s.graph) << "end\n";
  else
    out << "graph " << s.graph_spec << '\n';
  out << "program " << s.program << '\n'
      << "profile " << s.profile << '\n'
      << "seed " << s.seed << '\n'
      << "expect " << (s.expect == Expectation::Gather ? "GATHER" : "NEVER") << '\n'
      << "max_rounds " << s.max_rounds << '\n'
      << "advice " << s.advice << '\n';
  if (!s.dedicated_team.empty()) {
    out << "dedicated_team";
    for (auto l : s.dedicated_team) out << ' ' << l;
    out << '\n';
  }
  if (s.symmetry_period) out << "monitor symmetry " << *s.symmetry_period << '\n';
  for (const auto& p : s.placements) {
    out << "place " << p.node << ' ' << p.label << ' ';
    if (p.wake) out << *p.wake;
    else out << "never";
    out << '\n';
  }
  return out.str();
}

std::string scenario_hash(const Scenario& s) {
  auto text = serialize_scenario(s);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::ostringstream hex;
  for (int i = 0; i < 8; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

// --- constructions ---------------------------------------------------------------

Scenario symmetric_ring_scenario(const std::vector<Label>& team, std::uint64_t h_seed) {
  auto ix = indices(team);
  if (ix.sigma < 2) throw ScenarioError("the symmetric ring construction needs a symmetry index of at least 2");
  std::vector<Label> h;
  for (const auto& [l, c] : multiplicities(team))
    for (std::uint64_t i = 0; i < c / ix.sigma; ++i) h.push_back(l);
  if (h_seed != 0) {
    boost::random::mt19937_64 rng(h_seed);
    shuffle(h, rng);
  }
  const std::size_t k = ix.k;
  Scenario s;
  s.graph_spec = "ring " + std::to_string(k * ix.sigma);
  s.graph = graph_from_spec(s.graph_spec);
  for (std::size_t j = 0; j < ix.sigma; ++j)
    for (std::size_t i = 0; i < h.size(); ++i)
      s.placements.push_back({static_cast<Node>(i * ix.sigma + j * k), h[i], 1});
  s.program = "hg";
  s.expect = Expectation::Never;
  s.max_rounds = 10000;
  s.symmetry_period = k;
  return s;
}

void SymmetryMonitor::on_round(const World& w, const std::vector<RoundEvent>&) {
  std::vector<std::pair<Node, Memory>> snap;
  for (const auto& a : w.agents()) snap.emplace_back(a.node, a.memory);
  check(w.round() - 1, w.graph().node_count(), snap);
}

void SymmetryMonitor::check(std::uint64_t round, std::size_t n, const std::vector<std::pair<Node, Memory>>& snapshot) {
  ++rounds_;
  if (violation_round_) return;
  std::vector<std::vector<const MemoryNode*>> at(n);
  for (const auto& [v, m] : snapshot) at[v].push_back(m.id());
  for (auto& ids : at) std::sort(ids.begin(), ids.end(), std::less<>());
  for (std::size_t i = 0; i < n; ++i) {
    if (at[i] != at[(i + period_) % n]) {
      violation_round_ = round;
      violation_class_ = i % period_;
      return;
    }
  }
}

std::vector<Word> word_family(std::uint64_t b, std::uint64_t d, std::size_t max_length) {
  if (b == 0 || d == 0) throw std::invalid_argument("word family parameters must be positive");
  std::vector<Word> words{{1, 1, 2}};
  for (std::uint64_t i = 1;; ++i) {
    const auto& w = words.back();
    // P(|W|) = 4 b |W|^(d-1), guarded against overflow.
    long double len = 4.0L * b;
    for (std::uint64_t e = 1; e < d; ++e) len *= w.size();
    long double next = len * w.size() + 1;
    if (next > max_length) break;
    std::uint64_t p = 4 * b;
    for (std::uint64_t e = 1; e < d; ++e) p *= w.size();
    Word nw;
    nw.reserve(p * w.size() + 1);
    for (std::uint64_t r = 0; r < p; ++r) nw.insert(nw.end(), w.begin(), w.end());
    nw.push_back(i + 2);
    words.push_back(std::move(nw));
  }
  return words;
}

Scenario word_scenario(const Word& w) {
  Scenario s;
  s.graph_spec = "ring " + std::to_string(w.size());
  s.graph = graph_from_spec(s.graph_spec);
  for (std::size_t j = 0; j < w.size(); ++j) s.placements.push_back({static_cast<Node>(j), w[j], 1});
  return s;
}

}  // namespace gathering
