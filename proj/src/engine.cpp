#include "gathering/engine.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace gathering {

const char* tag_name(StateTag t) {
  switch (t) {
    case StateTag::Dormant: return "DORMANT";
    case StateTag::Cruiser: return "CRUISER";
    case StateTag::Token: return "TOKEN";
    case StateTag::Explorer: return "EXPLORER";
    case StateTag::Searcher: return "SEARCHER";
    case StateTag::Shadow: return "SHADOW";
    case StateTag::Exploring: return "EXPLORING";
    case StateTag::Advanced: return "ADVANCED";
    case StateTag::Walker: return "WALKER";
  }
  return "?";
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case Action::Kind::Wait: return "WAIT";
    case Action::Kind::Move: return "MOVE:" + std::to_string(a.port);
    case Action::Kind::Terminate: return "TERMINATE";
  }
  return "?";
}

const char* outcome_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Gathered: return "GATHERED";
    case Outcome::Kind::Diverged: return "DIVERGED";
    case Outcome::Kind::Timeout: return "TIMEOUT";
  }
  return "?";
}

void Assertions::fail(std::uint64_t round, const std::string& what) {
  std::string msg = "round " + std::to_string(round) + ": " + what;
  if (mode_ == AssertMode::FailFast) throw AssertionFailure(msg);
  failures_.push_back(msg);
}

World::World(std::shared_ptr<const PortGraph> graph, const std::vector<AgentSpec>& agents,
             const ProgramFactory& factory, WorldOptions options)
    : graph_(std::move(graph)), options_(options), assertions_(options.assert_mode) {
  if (agents.empty()) throw std::invalid_argument("a world needs at least one agent");
  std::vector<bool> used(graph_->node_count(), false);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& s = agents[i];
    if (s.node >= graph_->node_count()) throw std::invalid_argument("agent placed outside the graph");
    if (used[s.node]) throw std::invalid_argument("agents must start on distinct nodes");
    used[s.node] = true;
    if (s.wake_round && *s.wake_round == 0) throw std::invalid_argument("wake rounds start at 1");
    AgentRuntime a;
    a.sim_id = i;
    a.label = s.label;
    a.node = s.node;
    a.memory = Memory::leaf(s.label);
    a.program = factory(s.label);
    a.wake_round = s.wake_round;
    agents_.push_back(std::move(a));
  }
  arrival_.resize(agents_.size());
  awake_.assign(agents_.size(), false);
}

PeerInfo World::info_of(std::size_t i) const {
  const auto& a = agents_[i];
  PeerInfo p;
  p.arrival = arrival_[i];
  p.memory = a.memory;
  p.tag = a.program->tag();
  p.seniority = a.program->seniority();
  p.advanced = a.program->advanced();
  return p;
}

std::vector<PeerInfo> World::peer_view(std::size_t sim_id) const {
  std::vector<PeerInfo> out;
  if (!awake_.at(sim_id)) return out;
  for (std::size_t j = 0; j < agents_.size(); ++j)
    if (j != sim_id && awake_[j] && agents_[j].node == agents_[sim_id].node) out.push_back(info_of(j));
  return out;
}

void World::step() {
  if (outcome_) throw std::logic_error("the run has already ended");
  const std::uint64_t r = round_;
  const std::size_t k = agents_.size();

  std::vector<bool> just_woke(k, false);
  auto wake = [&](std::size_t i) {
    agents_[i].status = Status::Running;
    agents_[i].woke_at = r;
    just_woke[i] = true;
    if (!r0_) r0_ = r;
  };
  for (std::size_t i = 0; i < k; ++i)
    if (agents_[i].status == Status::Dormant && agents_[i].wake_round == r) wake(i);
  std::vector<bool> occupied(graph_->node_count(), false);
  for (const auto& a : agents_)
    if (a.status == Status::Running) occupied[a.node] = true;
  for (std::size_t i = 0; i < k; ++i)
    if (agents_[i].status == Status::Dormant && occupied[agents_[i].node]) wake(i);

  std::vector<std::vector<std::size_t>> at(graph_->node_count());
  for (std::size_t i = 0; i < k; ++i) {
    awake_[i] = agents_[i].status == Status::Running;
    if (!awake_[i]) continue;
    auto& a = agents_[i];
    arrival_[i] = a.moved_last_round ? a.pending_arrival : ArrivalInfo::stayed(graph_->degree(a.node));
    a.moved_last_round = false;
    at[a.node].push_back(i);
  }

  // Memories are computed from the previous round's snapshot.
  std::vector<Memory> old(k);
  for (std::size_t i = 0; i < k; ++i) old[i] = agents_[i].memory;
  for (std::size_t i = 0; i < k; ++i) {
    if (!awake_[i]) continue;
    const auto& here = at[agents_[i].node];
    if (just_woke[i] && here.size() == 1) {
      agents_[i].memory = Memory::leaf(agents_[i].label);
      continue;
    }
    std::vector<Memory::Met> met;
    for (auto j : here)
      if (j != i) met.push_back({arrival_[j], old[j]});
    agents_[i].memory = Memory::extend(old[i], arrival_[i], std::move(met));
  }
  for (const auto& here : at) {
    for (std::size_t x = 0; x < here.size(); ++x)
      for (std::size_t y = x + 1; y < here.size(); ++y)
        if (agents_[here[x]].memory == agents_[here[y]].memory)
          assertions_.fail(r, "colocated agents " + std::to_string(here[x]) + " and " + std::to_string(here[y]) +
                                  " share a memory");
  }

  for (std::size_t i = 0; i < k; ++i)
    if (awake_[i]) agents_[i].program->begin_round();

  std::vector<Decision> decisions(k);
  std::vector<int> tier(k, 0);
  std::vector<StateTag> tags(k, StateTag::Dormant);
  std::vector<std::vector<std::size_t>> peer_ids(k);
  std::vector<PeerInfo> infos(k);
  for (std::size_t i = 0; i < k; ++i)
    if (awake_[i]) {
      tier[i] = agents_[i].program->tier();
      tags[i] = agents_[i].program->tag();
      infos[i] = info_of(i);
    }
  for (int t = 0; t <= 2; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      if (!awake_[i] || tier[i] != t) continue;
      auto& ids = peer_ids[i];
      for (auto j : at[agents_[i].node])
        if (j != i) ids.push_back(j);
      // Identity-free order.
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        if (agents_[a].memory.hash() != agents_[b].memory.hash())
          return agents_[a].memory.hash() < agents_[b].memory.hash();
        return compare(agents_[a].memory, agents_[b].memory) < 0;
      });
      std::vector<PeerInfo> peers;
      for (auto j : ids) {
        peers.push_back(infos[j]);
        if (tier[j] < t) peers.back().decision = &decisions[j];
      }
      const auto& a = agents_[i];
      auto entry = arrival_[i].entry_port();
      Percept p{a.memory, graph_->degree(a.node),
                entry ? std::optional<Port>(static_cast<Port>(*entry)) : std::nullopt, peers};
      try {
        decisions[i] = agents_[i].program->step(p);
      } catch (const ProtocolError& e) {
        throw ProtocolError("round " + std::to_string(r) + " agent " + std::to_string(i) + ": " + e.what());
      }
      const auto& d = decisions[i];
      if (d.action.kind == Action::Kind::Move && d.action.port >= graph_->degree(a.node))
        throw ProtocolError("round " + std::to_string(r) + " agent " + std::to_string(i) + ": invalid port " +
                            std::to_string(d.action.port) + " at a node of degree " +
                            std::to_string(graph_->degree(a.node)));
      if (d.guide_peer >= static_cast<int>(ids.size()))
        throw ProtocolError("round " + std::to_string(r) + " agent " + std::to_string(i) + ": guide index out of range");
    }
  }

  events_.clear();
  for (std::size_t i = 0; i < k; ++i) {
    if (!awake_[i]) continue;
    RoundEvent e{r, i, agents_[i].node, tags[i], decisions[i], {}, agents_[i].memory, -1};
    for (auto j : at[agents_[i].node])
      if (j != i) e.met.push_back(j);
    if (decisions[i].guide_peer >= 0) e.guide_sim = static_cast<int>(peer_ids[i][decisions[i].guide_peer]);
    events_.push_back(std::move(e));
  }
  for (const auto& e : events_) trace_event(e);
  for (auto* o : observers_) o->on_round(*this, events_);

  std::vector<std::size_t> terminated;
  for (std::size_t i = 0; i < k; ++i) {
    if (!awake_[i]) continue;
    auto& a = agents_[i];
    const auto& act = decisions[i].action;
    if (act.kind == Action::Kind::Terminate) {
      a.status = Status::Terminated;
      terminated.push_back(i);
    } else if (act.kind == Action::Kind::Move) {
      Node to = graph_->succ(a.node, act.port);
      a.pending_arrival = ArrivalInfo::entered(graph_->degree(to), act.port, graph_->back_port(a.node, act.port));
      a.moved_last_round = true;
      a.node = to;
    }
  }
  if (!terminated.empty()) {
    Outcome o;
    o.round = r;
    o.r0 = r0_.value_or(0);
    o.node = agents_[terminated.front()].node;
    bool all = terminated.size() == k;
    for (auto i : terminated) all = all && agents_[i].node == o.node;
    o.kind = all ? Outcome::Kind::Gathered : Outcome::Kind::Diverged;
    outcome_ = o;
  }
  ++round_;
}

Outcome World::run(std::uint64_t max_rounds) {
  if (max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");
  while (!outcome_ && round_ <= max_rounds) step();
  if (outcome_) return *outcome_;
  Outcome o;
  o.kind = Outcome::Kind::Timeout;
  o.round = round_ - 1;
  o.r0 = r0_.value_or(0);
  return o;
}

void World::trace_event(const RoundEvent& e) {
  if (!options_.trace || options_.trace_level == TraceLevel::Verdict) return;
  auto& out = *options_.trace;
  out << "r=" << e.round << " a=" << e.sim_id << " v=" << e.node << " s=" << tag_name(e.tag)
      << " act=" << to_string(e.decision.action);
  if (e.decision.transit) out << " next=" << tag_name(*e.decision.transit);
  if (e.guide_sim >= 0) out << " guide=" << e.guide_sim;
  out << " met=";
  if (e.met.empty()) out << '-';
  for (std::size_t i = 0; i < e.met.size(); ++i) out << (i ? "," : "") << e.met[i];
  if (options_.trace_level == TraceLevel::Memory) {
    if (e.memory.rank() <= 20) out << " mem=" << describe(e.memory, 512);
    else out << " mem=" << describe(e.memory, 0);
  }
  out << '\n';
}

}  // namespace gathering
