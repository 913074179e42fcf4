#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gathering/engine.hpp"
#include "gathering/scenarios.hpp"
#include "gathering/subroutines.hpp"

namespace gathering {

// --- advice -------------------------------------------------------------------

// Smallest x with mu + 1 <= 2^(2^x), i.e. ceil(log log (mu + 1)).
std::uint64_t oracle_x(std::uint64_t mu);
std::string oracle_advice(const std::vector<Label>& team);

struct Advice {
  std::string bits;
  std::uint64_t x = 0;
  BigInt U = 2;  // 2^(2^x)
};
// Empty bits read as x = 0.
Advice parse_advice(const std::string& bits);

// Number of terms W of the explorer's wait sum_{i=1..W} 2^i:
// ceil(scale * 11 * ceil(beta * log2(eta U tau))).
std::uint64_t wait_exponent(std::uint64_t eta, const BigInt& U, std::uint64_t tau, const ConstantsProfile& profile);
BigInt wait_rounds(std::uint64_t eta, const BigInt& U, std::uint64_t tau, const ConstantsProfile& profile);
// ceil(U^(scale * 25 * beta)).
BigInt repeat_threshold(const BigInt& U, const ConstantsProfile& profile);

// --- dedicated gatherer ---------------------------------------------------------

// 1-based rank of a sub-multiset of `team` among all sub-multisets ordered by
// cardinality, then lexicographically on sorted label sequences.
std::uint64_t multisubset_rank(const std::vector<Label>& team, std::vector<Label> subset);

class DedicatedProgram : public AgentProgram {
public:
  DedicatedProgram(Label label, std::vector<Label> team, std::size_t n, const ConstantsProfile& profile);
  void begin_round() override;
  StateTag tag() const override { return advanced_ ? StateTag::Advanced : StateTag::Exploring; }
  bool advanced() const override { return advanced_; }
  Decision step(const Percept& p) override;

private:
  Label label_;
  std::vector<Label> team_;  // sorted
  ExploWalk walk_;
  bool advanced_ = false;
  std::vector<Label> current_;
  TzWalker tz_;
};

ProgramFactory dedicated_factory(const std::vector<Label>& team, std::size_t n, const ConstantsProfile& profile);

// --- HG --------------------------------------------------------------------------

class HgProgram : public AgentProgram {
public:
  HgProgram(Label label, BigInt U, const ConstantsProfile& profile);
  void begin_round() override;
  StateTag tag() const override { return tag_; }
  std::optional<std::uint64_t> seniority() const override;
  int tier() const override;
  Decision step(const Percept& p) override;

  std::uint64_t cruiser_rounds() const { return cruiser_rounds_; }
  std::uint64_t counter() const { return counter_; }

private:
  Decision transit(StateTag to, Memory guide = {}, int guide_peer = -1);
  Decision cruiser(const Percept& p);
  Decision searcher(const Percept& p);
  Decision token(const Percept& p);
  Decision shadow(const Percept& p);
  Decision explorer(const Percept& p);

  Label label_;
  BigInt U_;
  ConstantsProfile profile_;
  StateTag tag_ = StateTag::Cruiser;
  std::optional<StateTag> pending_;
  Memory pending_guide_;
  bool just_entered_ = true;
  std::uint64_t seniority_ = 0;

  // cruiser and searcher
  std::uint64_t phase_ = 1;
  ExploWalk explo_;
  std::optional<TzWalker> tz_;
  std::uint64_t tz_left_ = 0;
  std::uint64_t cruiser_rounds_ = 0;

  // shadow: the guide's memory in the previous round
  Memory guide_;

  // explorer
  std::uint64_t tau_ = 0;
  std::uint64_t counter_ = 1;
  BigInt threshold_;
  std::optional<EstPlus> est_;
  BigInt wait_left_ = 0;
  bool stepped_ = false;
  std::vector<std::uint64_t> trace_old_;
};

ProgramFactory hg_factory(const Advice& advice, const ConstantsProfile& profile);
ProgramFactory hg_plus_factory(const ConstantsProfile& profile);

// Runtime checks of the HG invariants that concern states, tokens and guides.
class HgMonitor : public RoundObserver {
public:
  explicit HgMonitor(Assertions& sink) : sink_(sink) {}
  void on_round(const World& w, const std::vector<RoundEvent>& events) override;

  struct EstRun {
    std::size_t sim_id;
    std::uint64_t start_round;
    std::uint64_t end_round = 0;
    std::set<Node> admitted;
  };
  const std::vector<EstRun>& completed_runs() const { return runs_; }
  std::optional<std::size_t> token_of(std::size_t explorer) const;
  std::uint64_t explorers_seen() const { return tok_.size(); }

private:
  struct Agent {
    std::optional<StateTag> last;
    std::set<StateTag> left;
    std::optional<std::size_t> tok, exp, guide;
    std::optional<Node> home;
    std::optional<EstRun> open;
  };
  Agent& agent(std::size_t i);

  Assertions& sink_;
  std::vector<Agent> agents_;
  std::map<std::size_t, std::size_t> tok_;
  std::vector<EstRun> runs_;
};

}  // namespace gathering
