#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gathering/graph.hpp"
#include "gathering/memory.hpp"

namespace gathering {

enum class StateTag : std::uint8_t {
  Dormant,
  Cruiser,
  Token,
  Explorer,
  Searcher,
  Shadow,
  Exploring,  // dedicated gatherer before completing EXPLO(n)
  Advanced,   // dedicated gatherer after completing EXPLO(n)
  Walker,     // scripted test programs
};
const char* tag_name(StateTag t);

struct Action {
  enum class Kind : std::uint8_t { Wait, Move, Terminate };
  Kind kind = Kind::Wait;
  Port port = 0;

  static Action wait() { return {}; }
  static Action move(Port p) { return {Kind::Move, p}; }
  static Action terminate() { return {Kind::Terminate, 0}; }
  bool operator==(const Action&) const = default;
};
std::string to_string(const Action& a);

enum Event : std::uint32_t {
  kEstStart = 1,
  kEstEnd = 2,
  kAdmit = 4,
};

struct Decision {
  Action action;
  std::optional<StateTag> transit;  // state entered at the next round
  Memory guide;                     // memory of the chosen guide when transiting to Shadow
  int guide_peer = -1;              // peer index followed this round
  std::uint32_t events = 0;
};

// What an agent perceives of a colocated awake agent. No simulator identity.
struct PeerInfo {
  ArrivalInfo arrival;
  Memory memory;
  StateTag tag = StateTag::Dormant;
  std::optional<std::uint64_t> seniority;
  bool advanced = false;
  // Decision of a peer that decides earlier in the round (lower tier); an
  // agent can derive it from the information the peer holds.
  const Decision* decision = nullptr;
};

struct Percept {
  const Memory& memory;
  Port degree;
  std::optional<Port> entry;
  const std::vector<PeerInfo>& peers;
};

class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AgentProgram {
public:
  virtual ~AgentProgram() = default;
  // Applies state changes decided in the previous round.
  virtual void begin_round() {}
  virtual StateTag tag() const = 0;
  virtual std::optional<std::uint64_t> seniority() const { return std::nullopt; }
  virtual bool advanced() const { return false; }
  // Decisions are taken tier by tier within a round; an agent sees the
  // decisions of colocated peers with a smaller tier.
  virtual int tier() const { return 0; }
  virtual Decision step(const Percept& p) = 0;
};

using ProgramFactory = std::function<std::unique_ptr<AgentProgram>(std::uint64_t label)>;

struct AgentSpec {
  Node node;
  std::uint64_t label;
  std::optional<std::uint64_t> wake_round;  // NONE: woken only by a visit
};

enum class Status : std::uint8_t { Dormant, Running, Terminated };

struct AgentRuntime {
  std::size_t sim_id = 0;
  std::uint64_t label = 0;
  Status status = Status::Dormant;
  Node node = 0;
  Memory memory;
  std::unique_ptr<AgentProgram> program;
  std::optional<std::uint64_t> wake_round;
  std::optional<std::uint64_t> woke_at;
  ArrivalInfo pending_arrival;  // valid when moved_last_round
  bool moved_last_round = false;
};

struct Outcome {
  enum class Kind { Gathered, Diverged, Timeout };
  Kind kind = Kind::Timeout;
  std::uint64_t round = 0;  // last executed round
  Node node = 0;            // gathering node
  std::uint64_t r0 = 0;     // first wake-up round
  std::uint64_t rounds_since_r0() const { return r0 == 0 ? 0 : round - r0; }
};
const char* outcome_name(Outcome::Kind k);

// One record per awake agent per round.
struct RoundEvent {
  std::uint64_t round;
  std::size_t sim_id;
  Node node;
  StateTag tag;
  Decision decision;
  std::vector<std::size_t> met;
  Memory memory;
  int guide_sim = -1;  // simulator identity of the peer named by decision.guide_peer
};

class AssertionFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class AssertMode { FailFast, Collect };

class Assertions {
public:
  explicit Assertions(AssertMode mode = AssertMode::FailFast) : mode_(mode) {}
  void fail(std::uint64_t round, const std::string& what);
  void check(bool ok, std::uint64_t round, const std::string& what) {
    if (!ok) fail(round, what);
  }
  const std::vector<std::string>& failures() const { return failures_; }
  AssertMode mode() const { return mode_; }

private:
  AssertMode mode_;
  std::vector<std::string> failures_;
};

class World;

class RoundObserver {
public:
  virtual ~RoundObserver() = default;
  virtual void on_round(const World& w, const std::vector<RoundEvent>& events) = 0;
};

enum class TraceLevel { Verdict, Tags, Memory };

struct WorldOptions {
  TraceLevel trace_level = TraceLevel::Verdict;
  std::ostream* trace = nullptr;
  AssertMode assert_mode = AssertMode::FailFast;
};

class World {
public:
  World(std::shared_ptr<const PortGraph> graph, const std::vector<AgentSpec>& agents, const ProgramFactory& factory,
        WorldOptions options = {});

  // Executes round `round()` and advances to the next one.
  void step();
  Outcome run(std::uint64_t max_rounds);

  std::uint64_t round() const { return round_; }
  const PortGraph& graph() const { return *graph_; }
  const std::vector<AgentRuntime>& agents() const { return agents_; }
  std::optional<std::uint64_t> r0() const { return r0_; }
  const std::optional<Outcome>& outcome() const { return outcome_; }
  // Events of the last executed round.
  const std::vector<RoundEvent>& last_events() const { return events_; }
  Assertions& assertions() { return assertions_; }
  const Assertions& assertions() const { return assertions_; }
  void add_observer(RoundObserver* o) { observers_.push_back(o); }

  // Peers of an agent as perceived in the last executed round.
  std::vector<PeerInfo> peer_view(std::size_t sim_id) const;

private:
  PeerInfo info_of(std::size_t i) const;
  void trace_event(const RoundEvent& e);

  std::shared_ptr<const PortGraph> graph_;
  std::vector<AgentRuntime> agents_;
  WorldOptions options_;
  Assertions assertions_;
  std::vector<RoundObserver*> observers_;
  std::uint64_t round_ = 1;
  std::optional<std::uint64_t> r0_;
  std::optional<Outcome> outcome_;
  std::vector<RoundEvent> events_;
  std::vector<ArrivalInfo> arrival_;  // A_X(r) of the last round, per agent
  std::vector<bool> awake_;           // awake in the last round
};

}  // namespace gathering
