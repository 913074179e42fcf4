#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gathering/engine.hpp"

namespace gathering {

using Rational = boost::rational<std::int64_t>;

struct ConstantsProfile {
  std::string name = "desk";
  int alpha = 2;
  int beta = 2;
  std::uint64_t c_explo = 1;
  Rational repeat_exponent_scale{1};
  Rational wait_exponent_scale{1};

  // EXPLO(N) length: c_explo * N^beta, saturating.
  std::uint64_t budget(std::uint64_t n) const;
};

ConstantsProfile paper_profile();
ConstantsProfile desk_profile();
ConstantsProfile profile_by_name(const std::string& name);

// --- EXPLO ------------------------------------------------------------------

// Offset sequence of the exploration walk. The sequence does not depend on N,
// so a walk that covers a graph within budget(n) steps also covers it within
// budget(N) for every N >= n.
std::uint64_t uxs_offset(std::uint64_t step);
Port uxs_port(std::uint64_t step, Port degree, std::optional<Port> entry);

class ExploWalk {
public:
  explicit ExploWalk(std::uint64_t budget = 0) : budget_(budget) {}
  bool done() const { return step_ >= budget_; }
  std::uint64_t steps() const { return step_; }
  // Next exit port; the entry port is ignored at the first step.
  Port next(Port degree, std::optional<Port> entry);

private:
  std::uint64_t budget_;
  std::uint64_t step_ = 0;
};

// Steps the walk needs to visit every node from `start` (0 if already
// covered), or nullopt if `limit` steps do not suffice.
std::optional<std::uint64_t> cover_steps(const PortGraph& g, Node start, std::uint64_t limit);
bool validate_coverage(const PortGraph& g, const ConstantsProfile& profile);
// Smallest c_explo for which every graph validates at N = n.
std::uint64_t minimal_c_explo(const std::vector<PortGraph>& graphs, int beta, std::uint64_t c_max = 64);

// --- TZ replacement ------------------------------------------------------------
//
// Phase p = 1, 2, ... has 2^p + 2 slots of three blocks of 2^(p-1) rounds.
// Slot s reads bit s of the transformed label (0 past its end): a 1-slot is
// [wait, walk, wait], a 0-slot waits throughout. The walk is the EXPLO walk
// restarted at each block. Phase lengths do not depend on the label, so two
// agents keep their start offset for the whole execution.

std::vector<bool> transformed_label(std::uint64_t label);

struct TzPosition {
  std::uint64_t phase;
  std::uint64_t slot;
  int block;  // 0, 1, 2
  std::uint64_t offset;
};
TzPosition tz_locate(std::uint64_t index);  // 0-based action index
std::uint64_t tz_phase_length(std::uint64_t phase);

struct NavObservation {
  Port degree;
  std::optional<Port> entry;
};

// Action i (1-based) of TZ(label); history holds the observations of rounds
// 1..i of the execution.
Action tz_action(std::uint64_t label, std::uint64_t i, const std::vector<NavObservation>& history);

class TzWalker {
public:
  explicit TzWalker(std::uint64_t label = 1);
  Action next(Port degree, std::optional<Port> entry);
  std::uint64_t actions() const { return index_; }

private:
  std::vector<bool> bits_;
  std::uint64_t index_ = 0;
};

// Rounds after the later start within which two agents running TZ with
// distinct labels meet, for a graph on which the EXPLO walk validates.
BigInt tz_meeting_bound(std::uint64_t n, std::uint64_t min_label_bits, std::uint64_t delay,
                        const ConstantsProfile& profile);

// --- EST ----------------------------------------------------------------------

struct EstObservation {
  Port degree;
  std::optional<Port> entry;
  bool token;
};

struct TreeNode {
  std::size_t parent = 0;
  Port port_at_parent = 0;
  Port port_at_child = 0;
  std::size_t depth = 0;
  bool processed = false;
  std::vector<Port> path;  // root to node, alternating exit and entry ports
};

class Est {
public:
  // Next port to take, or nullopt once the tree is complete and the agent is
  // back at the root.
  std::optional<Port> step(const EstObservation& o);
  bool complete() const { return mode_ == Mode::Done; }
  bool admitted_last() const { return admitted_; }
  const std::vector<TreeNode>& tree() const { return tree_; }
  std::uint64_t moves() const { return moves_count_; }

private:
  enum class Mode { Start, NextPort, AtX, CandBegin, CandStep, CandReturn, ToRoot, Select, GoTo, Done };
  std::optional<Port> move(Port p) {
    ++moves_count_;
    return p;
  }

  Mode mode_ = Mode::Start;
  std::vector<TreeNode> tree_;
  std::size_t w_ = 0;
  Port port_ = 0;
  Port x_entry_ = 0;
  std::size_t cand_ = 0;
  std::vector<Port> replay_;  // P: path from the candidate to the root
  std::size_t taken_ = 0;
  bool arrived_ = false;
  std::vector<Port> entries_;
  bool matched_ = false;
  std::vector<Port> plan_;
  std::size_t plan_pos_ = 0;
  std::size_t target_ = 0;
  bool admitted_ = false;
  std::uint64_t moves_count_ = 0;
};

struct EstPlusResult {
  bool b = false;
  std::uint64_t eta = 0;
  std::vector<std::tuple<Port, Port, bool>> trace;  // (p_i, q_i, m_i)
  bool operator==(const EstPlusResult&) const = default;
};

// Flat form: length header then p_1, q_1, m_1, ...
std::vector<std::uint64_t> serialize_trace(const EstPlusResult& r);

class EstPlus {
public:
  explicit EstPlus(Memory token_memory) : m_(std::move(token_memory)) {}
  // Called once per round from round t on; nullopt when complete.
  std::optional<Port> step(const Percept& p, std::uint64_t own_seniority);
  bool admitted_last() const { return est_.admitted_last(); }
  bool complete() const { return est_.complete(); }
  const EstPlusResult& result() const { return result_; }
  const Memory& token_memory() const { return m_; }

private:
  Memory m_;
  Est est_;
  std::uint64_t elapsed_ = 0;
  Port last_exit_ = 0;
  EstPlusResult result_;
};

}  // namespace gathering
