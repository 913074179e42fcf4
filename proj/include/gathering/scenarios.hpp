#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gathering/engine.hpp"
#include "gathering/graph.hpp"

namespace gathering {

using Label = std::uint64_t;

struct TeamIndices {
  std::size_t k = 0;
  Label lambda = 0;        // smallest label
  std::uint64_t sigma = 0;  // gcd of the multiplicities
  std::uint64_t mu = 0;     // largest multiplicity
};

TeamIndices indices(const std::vector<Label>& team);
bool gatherable(const std::vector<Label>& team);
std::map<Label, std::uint64_t> multiplicities(const std::vector<Label>& team);

// --- wake-up schedules ----------------------------------------------------------

struct Schedule {
  enum class Kind { AllAt1, Staggered, SubsetNever, Random };
  Kind kind = Kind::AllAt1;
  std::uint64_t delta = 0;             // Staggered
  std::vector<std::size_t> woken;      // SubsetNever: agents woken at round 1
  std::uint64_t seed = 0;              // Random
  std::uint64_t max_delay = 0;         // Random

  // all | staggered:D | never:I,J,... | random:SEED:MAX
  static Schedule parse(const std::string& text);
  std::string to_string() const;
};

std::vector<std::optional<std::uint64_t>> wake_rounds(const Schedule& s, std::size_t k);

// --- scenarios --------------------------------------------------------------------

struct Placement {
  Node node;
  Label label;
  std::optional<std::uint64_t> wake;  // nullopt: woken only by a visit
};

enum class Expectation { Gather, Never };

struct Scenario {
  std::string graph_spec;  // "ring 12", "k2", "random 8 10 3", "file PATH" or "inline"
  std::shared_ptr<const PortGraph> graph;
  std::vector<Placement> placements;
  std::string program = "hg";
  std::string profile = "desk";
  std::uint64_t seed = 0;
  Expectation expect = Expectation::Gather;
  std::uint64_t max_rounds = 100000;
  std::string advice = "oracle";      // oracle | none | bit string
  std::vector<Label> dedicated_team;  // team the dedicated gatherer is built for, if not the placed one
  std::optional<std::size_t> symmetry_period;

  std::vector<Label> team() const;
  std::vector<AgentSpec> agents() const;
  // Throws ScenarioError on an inconsistent scenario.
  void validate() const;
};

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(std::istream& in, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);
// First 16 hex digits of the SHA-256 of the canonical serialization.
std::string scenario_hash(const Scenario& s);

std::shared_ptr<const PortGraph> graph_from_spec(const std::string& spec);

// --- constructions ---------------------------------------------------------------

// Ring of size k*sigma; the agent at v_{i*sigma + j*k} has label h(i). The
// map h is sorted for h_seed 0 and a seeded shuffle otherwise.
Scenario symmetric_ring_scenario(const std::vector<Label>& team, std::uint64_t h_seed = 0);

// Nodes v_i and v_{i+period} hold equal memory multisets in every round.
class SymmetryMonitor : public RoundObserver {
public:
  explicit SymmetryMonitor(std::size_t period) : period_(period) {}
  void on_round(const World& w, const std::vector<RoundEvent>& events) override;
  // Checks one snapshot of (node, memory) pairs on a ring of n nodes.
  void check(std::uint64_t round, std::size_t n, const std::vector<std::pair<Node, Memory>>& snapshot);
  bool ok() const { return !violation_round_; }
  std::optional<std::uint64_t> violation_round() const { return violation_round_; }
  std::size_t violation_class() const { return violation_class_; }
  std::uint64_t rounds_checked() const { return rounds_; }

private:
  std::size_t period_;
  std::optional<std::uint64_t> violation_round_;
  std::size_t violation_class_ = 0;
  std::uint64_t rounds_ = 0;
};

using Word = std::vector<Label>;

// W_1 = 112, W_{i+1} = W_i^{P(|W_i|)} (i+2), P(x) = 4 b x^(d-1); stops before
// a word would exceed max_length.
std::vector<Word> word_family(std::uint64_t b, std::uint64_t d, std::size_t max_length = 1000000);
// |W|-ring, the j-th letter on node j-1, everybody woken at round 1.
Scenario word_scenario(const Word& w);

}  // namespace gathering
