#include "gathering/algorithms.hpp"

#include <algorithm>
#include <boost/multiprecision/integer.hpp>

namespace gathering {

namespace bmp = boost::multiprecision;

// --- advice ---------------------------------------------------------------------

std::uint64_t oracle_x(std::uint64_t mu) {
  if (mu == 0) throw std::invalid_argument("multiplicity index is at least 1");
  std::uint64_t x = 0;
  while (BigInt(mu) + 1 > (BigInt(1) << (std::size_t{1} << x))) ++x;
  return x;
}

std::string oracle_advice(const std::vector<Label>& team) {
  std::uint64_t x = oracle_x(indices(team).mu);
  if (x == 0) return "0";
  std::string bits;
  for (; x > 0; x >>= 1) bits.insert(bits.begin(), static_cast<char>('0' + (x & 1)));
  return bits;
}

Advice parse_advice(const std::string& bits) {
  Advice a;
  a.bits = bits;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("advice is a bit string");
    a.x = a.x * 2 + static_cast<std::uint64_t>(c - '0');
    if (a.x > 20) throw std::invalid_argument("advice value too large");
  }
  a.U = BigInt(1) << (std::size_t{1} << a.x);
  return a;
}

namespace {

// Smallest e with 2^e >= v, for v >= 1.
std::uint64_t ceil_log2(const BigInt& v) {
  if (v <= 1) return 0;
  auto m = bmp::msb(v);
  return (BigInt(1) << m) == v ? m : m + 1;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

}  // namespace

std::uint64_t wait_exponent(std::uint64_t eta, const BigInt& U, std::uint64_t tau, const ConstantsProfile& profile) {
  BigInt x = BigInt(eta) * U * BigInt(tau);
  if (x < 1) throw std::invalid_argument("eta, U and tau are positive");
  std::uint64_t e = ceil_log2(bmp::pow(x, static_cast<unsigned>(profile.beta)));
  auto s = profile.wait_exponent_scale;
  BigInt w = ceil_div(BigInt(11) * e * s.numerator(), BigInt(s.denominator()));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(w));
}

BigInt wait_rounds(std::uint64_t eta, const BigInt& U, std::uint64_t tau, const ConstantsProfile& profile) {
  return (BigInt(1) << (wait_exponent(eta, U, tau, profile) + 1)) - 2;
}

BigInt repeat_threshold(const BigInt& U, const ConstantsProfile& profile) {
  auto s = profile.repeat_exponent_scale;
  BigInt z = bmp::pow(U, static_cast<unsigned>(25 * profile.beta * s.numerator()));
  auto q = static_cast<unsigned>(s.denominator());
  if (q == 1) return z;
  // Smallest y with y^q >= z.
  BigInt lo = 1, hi = BigInt(1) << (bmp::msb(z) / q + 2);
  while (lo < hi) {
    BigInt mid = (lo + hi) / 2;
    if (bmp::pow(mid, q) >= z) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

// --- dedicated gatherer ---------------------------------------------------------

std::uint64_t multisubset_rank(const std::vector<Label>& team, std::vector<Label> subset) {
  auto mult = multiplicities(team);
  std::vector<std::pair<Label, std::uint64_t>> m(mult.begin(), mult.end());
  std::vector<std::vector<Label>> all{{}};
  for (const auto& [l, c] : m) {
    std::vector<std::vector<Label>> next;
    for (const auto& s : all)
      for (std::uint64_t r = 0; r <= c; ++r) {
        auto t = s;
        t.insert(t.end(), r, l);
        next.push_back(std::move(t));
      }
    all = std::move(next);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::sort(subset.begin(), subset.end());
  auto it = std::lower_bound(all.begin(), all.end(), subset, [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  if (it == all.end() || *it != subset) throw ProtocolError("label multiset is not contained in the team");
  return static_cast<std::uint64_t>(it - all.begin()) + 1;
}

DedicatedProgram::DedicatedProgram(Label label, std::vector<Label> team, std::size_t n,
                                   const ConstantsProfile& profile)
    : label_(label), team_(std::move(team)), walk_(profile.budget(n)) {
  if (indices(team_).sigma != 1) throw std::invalid_argument("the dedicated gatherer needs a symmetry index of 1");
  std::sort(team_.begin(), team_.end());
}

void DedicatedProgram::begin_round() {
  if (!advanced_ && walk_.done()) advanced_ = true;
}

Decision DedicatedProgram::step(const Percept& p) {
  Decision d;
  if (!advanced_) {
    d.action = Action::move(walk_.next(p.degree, p.entry));
    return d;
  }
  std::vector<Label> cur{label_};
  for (const auto& peer : p.peers)
    if (peer.advanced) cur.push_back(peer.memory.label());
  std::sort(cur.begin(), cur.end());
  if (cur != current_) {
    current_ = cur;
    tz_ = TzWalker(multisubset_rank(team_, cur));
  }
  if (current_ == team_) {
    d.action = Action::terminate();
    return d;
  }
  d.action = tz_.next(p.degree, p.entry);
  return d;
}

ProgramFactory dedicated_factory(const std::vector<Label>& team, std::size_t n, const ConstantsProfile& profile) {
  if (indices(team).sigma != 1) throw std::invalid_argument("the dedicated gatherer needs a symmetry index of 1");
  return [team, n, profile](Label label) { return std::make_unique<DedicatedProgram>(label, team, n, profile); };
}

// --- HG ---------------------------------------------------------------------------

HgProgram::HgProgram(Label label, BigInt U, const ConstantsProfile& profile)
    : label_(label), U_(std::move(U)), profile_(profile), explo_(profile.budget(2)), tz_left_(2) {
  threshold_ = repeat_threshold(U_, profile_);
}

std::optional<std::uint64_t> HgProgram::seniority() const {
  if (tag_ == StateTag::Token || tag_ == StateTag::Explorer) return seniority_;
  return std::nullopt;
}

int HgProgram::tier() const {
  if (tag_ == StateTag::Token) return 1;
  if (tag_ == StateTag::Shadow) return 2;
  return 0;
}

void HgProgram::begin_round() {
  if (pending_) {
    tag_ = *pending_;
    pending_.reset();
    seniority_ = 0;
    switch (tag_) {
      case StateTag::Searcher:
        phase_ = 1;
        explo_ = ExploWalk(profile_.budget(2));
        break;
      case StateTag::Shadow:
        guide_ = pending_guide_;
        break;
      case StateTag::Explorer:
        tau_ = cruiser_rounds_;
        counter_ = 1;
        break;
      default:
        break;
    }
    return;
  }
  if (just_entered_) {
    just_entered_ = false;
    return;
  }
  ++seniority_;
}

Decision HgProgram::transit(StateTag to, Memory guide, int guide_peer) {
  pending_ = to;
  pending_guide_ = guide;
  Decision d;
  d.transit = to;
  d.guide = std::move(guide);
  d.guide_peer = guide_peer;
  return d;
}

Decision HgProgram::step(const Percept& p) {
  switch (tag_) {
    case StateTag::Cruiser: return cruiser(p);
    case StateTag::Searcher: return searcher(p);
    case StateTag::Token: return token(p);
    case StateTag::Shadow: return shadow(p);
    case StateTag::Explorer: return explorer(p);
    default: throw ProtocolError(std::string("HG has no state ") + tag_name(tag_));
  }
}

Decision HgProgram::cruiser(const Percept& p) {
  ++cruiser_rounds_;
  int largest = -1;
  bool smallest = true, own_largest = true;
  for (std::size_t i = 0; i < p.peers.size(); ++i) {
    const auto& q = p.peers[i];
    if (q.tag == StateTag::Token) return transit(StateTag::Shadow, q.memory, static_cast<int>(i));
  }
  for (std::size_t i = 0; i < p.peers.size(); ++i) {
    const auto& q = p.peers[i];
    if (q.tag != StateTag::Cruiser) continue;
    if (compare(q.memory, p.memory) > 0) own_largest = false;
    else smallest = false;
    if (largest < 0 || compare(q.memory, p.peers[largest].memory) > 0) largest = static_cast<int>(i);
  }
  if (largest >= 0) {
    if (own_largest) return transit(StateTag::Token);
    if (smallest) return transit(StateTag::Explorer);
    return transit(StateTag::Shadow, p.peers[largest].memory, largest);
  }

  Decision d;
  while (true) {
    if (!explo_.done()) {
      d.action = Action::move(explo_.next(p.degree, p.entry));
      return d;
    }
    if (tz_left_ > 0) {
      if (!tz_) tz_.emplace(label_);
      --tz_left_;
      d.action = tz_->next(p.degree, p.entry);
      return d;
    }
    ++phase_;
    if (phase_ >= 62) throw ProtocolError("cruiser phase overflow");
    explo_ = ExploWalk(profile_.budget(std::uint64_t{1} << phase_));
    tz_.reset();
    tz_left_ = std::uint64_t{1} << phase_;
  }
}

Decision HgProgram::searcher(const Percept& p) {
  for (std::size_t i = 0; i < p.peers.size(); ++i)
    if (p.peers[i].tag == StateTag::Token) return transit(StateTag::Shadow, p.peers[i].memory, static_cast<int>(i));
  if (explo_.done()) {
    ++phase_;
    if (phase_ >= 62) throw ProtocolError("searcher phase overflow");
    explo_ = ExploWalk(profile_.budget(std::uint64_t{1} << phase_));
  }
  Decision d;
  d.action = Action::move(explo_.next(p.degree, p.entry));
  return d;
}

Decision HgProgram::token(const Percept& p) {
  bool any = false, to_searcher = false, all_terminate = true;
  for (const auto& q : p.peers) {
    if (q.tag != StateTag::Explorer) continue;
    if (!q.decision) throw ProtocolError("token cannot see an explorer's decision");
    any = true;
    if (q.decision->transit == StateTag::Searcher) to_searcher = true;
    if (q.decision->action.kind != Action::Kind::Terminate) all_terminate = false;
  }
  bool terminate = any && all_terminate;
  if (to_searcher) {
    bool some_terminate = std::any_of(p.peers.begin(), p.peers.end(), [](const PeerInfo& q) {
      return q.tag == StateTag::Explorer && q.decision->action.kind == Action::Kind::Terminate;
    });
    if (some_terminate) throw ProtocolError("explorers at a token both terminate and become searchers");
    return transit(StateTag::Searcher);
  }
  Decision d;
  if (terminate) d.action = Action::terminate();
  return d;
}

Decision HgProgram::shadow(const Percept& p) {
  int found = -1;
  for (std::size_t i = 0; i < p.peers.size(); ++i) {
    const auto& q = p.peers[i];
    if (q.memory.is_leaf() || q.memory.prev() != guide_) continue;
    auto e = q.arrival.entry_port();
    bool same_entry = e.has_value() == p.entry.has_value() && (!e || *e == *p.entry);
    if (!same_entry) continue;
    if (found >= 0) throw ProtocolError("shadow cannot tell its guide apart");
    found = static_cast<int>(i);
  }
  if (found < 0) throw ProtocolError("shadow lost its guide");
  const auto& g = p.peers[found];
  if (!g.decision) throw ProtocolError("shadow cannot see its guide's decision");
  Decision d;
  d.guide_peer = found;
  if (g.decision->transit) {
    guide_ = *g.decision->transit == StateTag::Shadow ? g.decision->guide : g.memory;
    return d;
  }
  d.action = g.decision->action;
  guide_ = g.memory;
  return d;
}

Decision HgProgram::explorer(const Percept& p) {
  Decision d;
  if (wait_left_ > 0) {
    --wait_left_;
    return d;
  }
  if (!est_) {
    if (stepped_ && BigInt(counter_) == threshold_) {
      d.action = Action::terminate();
      return d;
    }
    const PeerInfo* tok = nullptr;
    for (const auto& q : p.peers)
      if (q.tag == StateTag::Token) tok = &q;
    if (!tok) throw ProtocolError("explorer is not with a token at the start of a step");
    est_.emplace(tok->memory);
    d.events |= kEstStart;
  }
  auto mv = est_->step(p, seniority_);
  if (mv) {
    if (est_->admitted_last()) d.events |= kAdmit;
    d.action = Action::move(*mv);
    return d;
  }
  d.events |= kEstEnd;
  auto res = est_->result();
  est_.reset();
  stepped_ = true;
  if (res.b) {
    auto t = transit(StateTag::Searcher);
    t.events = d.events;
    return t;
  }
  wait_left_ = wait_rounds(res.eta, U_, tau_, profile_) - 1;
  auto trace = serialize_trace(res);
  counter_ = trace == trace_old_ ? counter_ + 1 : 1;
  trace_old_ = std::move(trace);
  return d;
}

ProgramFactory hg_factory(const Advice& advice, const ConstantsProfile& profile) {
  return [U = advice.U, profile](Label label) { return std::make_unique<HgProgram>(label, U, profile); };
}

ProgramFactory hg_plus_factory(const ConstantsProfile& profile) {
  return [profile](Label label) { return std::make_unique<HgProgram>(label, BigInt(2), profile); };
}

// --- monitor ----------------------------------------------------------------------

HgMonitor::Agent& HgMonitor::agent(std::size_t i) {
  if (agents_.size() <= i) agents_.resize(i + 1);
  return agents_[i];
}

std::optional<std::size_t> HgMonitor::token_of(std::size_t explorer) const {
  auto it = tok_.find(explorer);
  if (it == tok_.end()) return std::nullopt;
  return it->second;
}

void HgMonitor::on_round(const World& w, const std::vector<RoundEvent>& events) {
  const std::uint64_t r = w.round() - 1;
  std::map<std::size_t, const RoundEvent*> by_sim;
  for (const auto& e : events) by_sim[e.sim_id] = &e;
  auto transits_to = [](const RoundEvent* e, StateTag t) { return e && e->decision.transit == t; };
  auto name = [](std::size_t i) { return "agent " + std::to_string(i); };

  // One-shot states.
  for (const auto& e : events) {
    auto& a = agent(e.sim_id);
    if (a.last && *a.last != e.tag) a.left.insert(*a.last);
    if (a.left.count(e.tag)) sink_.fail(r, name(e.sim_id) + " re-enters state " + tag_name(e.tag));
    a.last = e.tag;
  }

  // Token uniqueness and token/explorer pairing.
  std::map<Node, std::vector<const RoundEvent*>> at;
  for (const auto& e : events) at[e.node].push_back(&e);
  for (const auto& [v, here] : at) {
    std::vector<std::size_t> tokens, new_tok, new_exp;
    for (auto* e : here) {
      if (e->tag == StateTag::Token) tokens.push_back(e->sim_id);
      if (transits_to(e, StateTag::Token)) new_tok.push_back(e->sim_id);
      if (transits_to(e, StateTag::Explorer)) new_exp.push_back(e->sim_id);
    }
    if (tokens.size() > 1) sink_.fail(r, "two tokens at node " + std::to_string(v));
    if (new_tok.size() != new_exp.size() || new_tok.size() > 1)
      sink_.fail(r, "unpaired token/explorer creation at node " + std::to_string(v));
    else if (new_tok.size() == 1) {
      tok_[new_exp[0]] = new_tok[0];
      agent(new_exp[0]).tok = new_tok[0];
      agent(new_exp[0]).home = v;
      agent(new_tok[0]).exp = new_exp[0];
      agent(new_tok[0]).home = v;
    }
  }

  for (const auto& e : events) {
    auto& a = agent(e.sim_id);
    // Co-transit of an explorer and its token.
    if (e.tag == StateTag::Explorer || e.tag == StateTag::Token) {
      auto partner = e.tag == StateTag::Explorer ? a.tok : a.exp;
      if (!partner) {
        sink_.fail(r, name(e.sim_id) + " has no token/explorer partner");
      } else {
        auto it = by_sim.find(*partner);
        const RoundEvent* pe = it == by_sim.end() ? nullptr : it->second;
        if (transits_to(&e, StateTag::Searcher) != transits_to(pe, StateTag::Searcher))
          sink_.fail(r, name(e.sim_id) + " and " + name(*partner) + " do not leave for searcher together");
      }
    }
    // The explorer is home with its token whenever a step starts or ends.
    if (e.decision.events & (kEstStart | kEstEnd)) {
      bool ok = a.home && e.node == *a.home && a.tok;
      if (ok) {
        auto it = by_sim.find(*a.tok);
        ok = it != by_sim.end() && it->second->node == e.node && it->second->tag == StateTag::Token;
      }
      if (!ok) sink_.fail(r, name(e.sim_id) + " is not home with its token at a step boundary");
    }
    // Guide well-formedness.
    if (e.tag == StateTag::Shadow) {
      const RoundEvent* g = nullptr;
      if (a.guide) {
        auto it = by_sim.find(*a.guide);
        if (it != by_sim.end()) g = it->second;
      }
      if (!g || g->node != e.node || (g->tag != StateTag::Searcher && g->tag != StateTag::Token))
        sink_.fail(r, name(e.sim_id) + " has no colocated searcher or token guide");
      else if (e.guide_sim != static_cast<int>(g->sim_id))
        sink_.fail(r, name(e.sim_id) + " resolves the wrong guide");
    }
  }
  // Guides of the next round.
  std::vector<std::pair<std::size_t, std::optional<std::size_t>>> updates;
  for (const auto& e : events) {
    auto& a = agent(e.sim_id);
    if (transits_to(&e, StateTag::Shadow)) {
      if (e.guide_sim < 0) sink_.fail(r, name(e.sim_id) + " becomes a shadow without a guide");
      else updates.emplace_back(e.sim_id, static_cast<std::size_t>(e.guide_sim));
    } else if (e.tag == StateTag::Shadow && a.guide) {
      auto it = by_sim.find(*a.guide);
      if (it != by_sim.end() && transits_to(it->second, StateTag::Shadow) && it->second->guide_sim >= 0)
        updates.emplace_back(e.sim_id, static_cast<std::size_t>(it->second->guide_sim));
    }
  }
  for (const auto& [s, g] : updates) agent(s).guide = g;

  // Nodes admitted per EST+ run.
  for (const auto& e : events) {
    auto& a = agent(e.sim_id);
    if (e.decision.events & kEstStart) a.open = EstRun{e.sim_id, r, 0, {e.node}};
    if ((e.decision.events & kAdmit) && a.open) a.open->admitted.insert(e.node);
    if ((e.decision.events & kEstEnd) && a.open) {
      a.open->end_round = r;
      runs_.push_back(std::move(*a.open));
      a.open.reset();
    }
  }
}

}  // namespace gathering
