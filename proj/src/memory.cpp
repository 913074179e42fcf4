#include "gathering/memory.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <unordered_map>

namespace gathering {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t arrival_hash(const ArrivalInfo& a) {
  std::uint64_t h = mix64(a.degree);
  if (a.moved) h = mix64(h ^ mix64(a.taken + 1) ^ (mix64(a.entry + 2) << 1));
  return h;
}

}  // namespace

class MemoryNode : public std::enable_shared_from_this<MemoryNode> {
public:
  std::uint64_t rank = 0;
  std::uint64_t label = 0;
  std::uint64_t hash = 0;
  Memory prev;
  ArrivalInfo arrival;
  std::vector<Memory::Met> met;  // sorted by (arrival, node address)

  // Guarded by the order mutex.
  mutable std::unique_ptr<BigInt> length;
  mutable std::vector<std::uint32_t> canonical;  // met indices in byte order
  mutable bool canonical_ready = false;

  ~MemoryNode();

  bool same_structure(const Memory& p, const ArrivalInfo& a, const std::vector<Memory::Met>& m) const {
    if (!(prev == p) || !(arrival == a) || met.size() != m.size()) return false;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (!(met[i].arrival == m[i].arrival) || !(met[i].memory == m[i].memory)) return false;
    return true;
  }

  static Memory wrap(std::shared_ptr<const MemoryNode> n) { return Memory(std::move(n)); }
  static std::shared_ptr<const MemoryNode>& raw(Memory& m) { return m.node_; }
};

namespace {

struct InternTable {
  std::mutex mu;
  std::unordered_multimap<std::uint64_t, const MemoryNode*> map;
};

InternTable& table() {
  static auto* t = new InternTable;  // never destroyed: nodes may outlive static teardown
  return *t;
}

std::mutex& order_mutex() {
  static auto* m = new std::mutex;
  return *m;
}

thread_local std::vector<std::shared_ptr<const MemoryNode>> t_pending;
thread_local bool t_draining = false;

Memory intern(std::uint64_t hash, std::uint64_t rank, std::uint64_t label, const Memory& prev,
              const ArrivalInfo& arrival, std::vector<Memory::Met>&& met) {
  auto& t = table();
  std::shared_ptr<MemoryNode> fresh;
  {
    std::lock_guard lock(t.mu);
    auto [lo, hi] = t.map.equal_range(hash);
    for (auto it = lo; it != hi; ++it) {
      if (!it->second->same_structure(prev, arrival, met)) continue;
      if (auto sp = it->second->weak_from_this().lock()) return MemoryNode::wrap(std::move(sp));
    }
    fresh = std::make_shared<MemoryNode>();
    fresh->rank = rank;
    fresh->label = label;
    fresh->hash = hash;
    fresh->prev = prev;
    fresh->arrival = arrival;
    fresh->met = std::move(met);
    t.map.emplace(hash, fresh.get());
  }
  return MemoryNode::wrap(std::move(fresh));
}

}  // namespace

MemoryNode::~MemoryNode() {
  {
    auto& t = table();
    std::lock_guard lock(t.mu);
    auto [lo, hi] = t.map.equal_range(hash);
    for (auto it = lo; it != hi; ++it)
      if (it->second == this) {
        t.map.erase(it);
        break;
      }
  }
  // Long prev chains would otherwise be released recursively.
  if (auto& p = raw(prev)) t_pending.push_back(std::move(p));
  for (auto& m : met)
    if (auto& p = raw(m.memory)) t_pending.push_back(std::move(p));
  if (t_draining) return;
  t_draining = true;
  while (!t_pending.empty()) {
    auto p = std::move(t_pending.back());
    t_pending.pop_back();
    p.reset();
  }
  t_draining = false;
}

Memory Memory::leaf(std::uint64_t label) {
  if (label == 0) throw MemoryError("labels are positive integers");
  return intern(mix64(label ^ 0x5bd1e995ULL), 0, label, Memory(), ArrivalInfo{}, {});
}

Memory Memory::extend(const Memory& prev, const ArrivalInfo& arrival, std::vector<Met> met) {
  if (!prev.valid()) throw MemoryError("extend of an empty memory");
  if (arrival.degree == 0) throw MemoryError("arrival degree must be positive");
  for (const auto& m : met)
    if (!m.memory.valid()) throw MemoryError("empty memory in met set");
  std::sort(met.begin(), met.end(), [](const Met& a, const Met& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return std::less<const MemoryNode*>()(a.memory.id(), b.memory.id());
  });
  met.erase(std::unique(met.begin(), met.end(),
                        [](const Met& a, const Met& b) { return a.arrival == b.arrival && a.memory == b.memory; }),
            met.end());
  std::uint64_t set_hash = mix64(met.size());
  for (const auto& m : met) set_hash += mix64(arrival_hash(m.arrival) ^ m.memory.hash());
  std::uint64_t h = mix64(prev.hash() * 0x100000001b3ULL ^ arrival_hash(arrival) ^ mix64(set_hash));
  return intern(h, prev.rank() + 1, prev.label(), prev, arrival, std::move(met));
}

bool Memory::is_leaf() const { return node_->rank == 0; }
std::uint64_t Memory::rank() const { return node_->rank; }
std::uint64_t Memory::label() const { return node_->label; }
Memory Memory::prev() const { return node_->prev; }
const ArrivalInfo& Memory::arrival() const { return node_->arrival; }
const std::vector<Memory::Met>& Memory::met() const { return node_->met; }
std::uint64_t Memory::hash() const { return node_->hash; }

Memory Memory::unwind(std::uint64_t layers) const {
  Memory m = *this;
  while (layers-- > 0 && m.valid() && !m.is_leaf()) m = m.prev();
  return m;
}

// ---------------------------------------------------------------------------
// Order machinery. Everything below assumes the order mutex is held.

namespace {

using NodeP = const MemoryNode*;

NodeP np(const Memory& m) { return m.id(); }

std::size_t nbytes(const BigInt& x) {
  if (x == 0) return 1;
  return (boost::multiprecision::msb(x) / 8) + 1;
}

BigInt lp_size(const BigInt& len) { return BigInt(4 + nbytes(len)) + len; }

std::uint64_t arrival_len(const ArrivalInfo& a) { return a.moved ? 25 : 9; }

const BigInt& length_of(NodeP root);

BigInt met_len(NodeP n) {
  BigInt s = 8;
  for (const auto& m : n->met) s += lp_size(arrival_len(m.arrival)) + lp_size(length_of(np(m.memory)));
  return s;
}

BigInt tail_len(NodeP n) { return lp_size(arrival_len(n->arrival)) + lp_size(met_len(n)); }

const BigInt& length_of(NodeP root) {
  if (root->length) return *root->length;
  std::vector<std::pair<NodeP, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    if (n->length) {
      stack.pop_back();
      continue;
    }
    if (n->rank == 0) {
      n->length = std::make_unique<BigInt>(9);
      stack.pop_back();
      continue;
    }
    if (!expanded) {
      stack.back().second = true;
      if (!np(n->prev)->length) stack.push_back({np(n->prev), false});
      for (const auto& m : n->met)
        if (!np(m.memory)->length) stack.push_back({np(m.memory), false});
      continue;
    }
    stack.pop_back();
    n->length = std::make_unique<BigInt>(1 + lp_size(*np(n->prev)->length) + tail_len(n));
  }
  return *root->length;
}

int sgn(int x) { return (x > 0) - (x < 0); }

int cmp_big(const BigInt& a, const BigInt& b) { return a < b ? -1 : (b < a ? 1 : 0); }

template <class T>
int cmp_val(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

// Bytewise order of LP(arrival): shorter (not moved) first, then fields.
int cmp_arrival_lp(const ArrivalInfo& a, const ArrivalInfo& b) {
  if (a.moved != b.moved) return a.moved ? 1 : -1;
  if (int c = cmp_val(a.degree, b.degree)) return c;
  if (!a.moved) return 0;
  if (int c = cmp_val(a.taken, b.taken)) return c;
  return cmp_val(a.entry, b.entry);
}

int lexcmp(NodeP x, NodeP y);

int cmp_pair(const Memory::Met& p, const Memory::Met& q) {
  if (int c = cmp_arrival_lp(p.arrival, q.arrival)) return c;
  if (p.memory == q.memory) return 0;
  if (int c = cmp_big(length_of(np(p.memory)), length_of(np(q.memory)))) return c;
  return lexcmp(np(p.memory), np(q.memory));
}

const std::vector<std::uint32_t>& canonical(NodeP n) {
  if (!n->canonical_ready) {
    n->canonical.resize(n->met.size());
    for (std::uint32_t i = 0; i < n->met.size(); ++i) n->canonical[i] = i;
    std::sort(n->canonical.begin(), n->canonical.end(),
              [n](std::uint32_t a, std::uint32_t b) { return cmp_pair(n->met[a], n->met[b]) < 0; });
    n->canonical_ready = true;
  }
  return n->canonical;
}

// Compares LP(arrival) | LP(met) of two nodes.
int cmp_tail(NodeP x, NodeP y) {
  if (int c = cmp_arrival_lp(x->arrival, y->arrival)) return c;
  if (int c = cmp_big(met_len(x), met_len(y))) return c;
  if (int c = cmp_val(x->met.size(), y->met.size())) return c;
  const auto& cx = canonical(x);
  const auto& cy = canonical(y);
  for (std::size_t i = 0; i < cx.size(); ++i)
    if (int c = cmp_pair(x->met[cx[i]], y->met[cy[i]])) return c;
  return 0;
}

// Bytewise comparison of encode(x) and encode(y).
int lexcmp(NodeP x, NodeP y) {
  std::vector<std::pair<NodeP, NodeP>> stack;
  int c = 0;
  while (true) {
    if (x == y) break;
    if (x->rank == 0 || y->rank == 0) {
      if (x->rank == 0 && y->rank == 0) c = cmp_val(x->label, y->label);
      else c = x->rank == 0 ? -1 : 1;
      return c;
    }
    if (x->prev == y->prev) return cmp_tail(x, y);
    if ((c = cmp_big(length_of(np(x->prev)), length_of(np(y->prev))))) return c;
    stack.push_back({x, y});
    x = np(x->prev);
    y = np(y->prev);
  }
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if ((c = cmp_tail(a, b))) return c;
  }
  return 0;
}

int compare_f_locked(NodeP a, NodeP b) {
  if (a == b) return 0;
  if (a->rank > 0 && b->rank > 0 && a->prev == b->prev) {
    if (int c = cmp_big(tail_len(a), tail_len(b))) return c;
    return cmp_tail(a, b);
  }
  if (int c = cmp_big(length_of(a), length_of(b))) return c;
  return lexcmp(a, b);
}

std::strong_ordering to_ordering(int c) {
  return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// --- encoding ---------------------------------------------------------------

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_lf(std::vector<std::uint8_t>& out, const BigInt& len) {
  std::size_t k = nbytes(len);
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(k >> s));
  for (std::size_t i = k; i-- > 0;) out.push_back(static_cast<std::uint8_t>(static_cast<unsigned>((len >> (8 * i)) & 0xff)));
}

void put_arrival(std::vector<std::uint8_t>& out, const ArrivalInfo& a) {
  put_lf(out, arrival_len(a));
  put_u64(out, a.degree);
  out.push_back(a.moved ? 1 : 0);
  if (a.moved) {
    put_u64(out, a.taken);
    put_u64(out, a.entry);
  }
}

void put_memory(std::vector<std::uint8_t>& out, NodeP n);

void put_tail(std::vector<std::uint8_t>& out, NodeP n) {
  put_arrival(out, n->arrival);
  put_lf(out, met_len(n));
  put_u64(out, n->met.size());
  for (auto i : canonical(n)) {
    put_arrival(out, n->met[i].arrival);
    put_lf(out, length_of(np(n->met[i].memory)));
    put_memory(out, np(n->met[i].memory));
  }
}

void put_memory(std::vector<std::uint8_t>& out, NodeP n) {
  std::vector<NodeP> chain;
  for (NodeP c = n; c->rank > 0; c = np(c->prev)) {
    chain.push_back(c);
    out.push_back(1);
    put_lf(out, length_of(np(c->prev)));
  }
  NodeP leaf = chain.empty() ? n : np(chain.back()->prev);
  out.push_back(0);
  put_u64(out, leaf->label);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) put_tail(out, *it);
}

constexpr std::uint64_t kMaxEncodeBytes = 1ULL << 28;

struct Reader {
  const std::vector<std::uint8_t>& b;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw MemoryError("decode error at byte " + std::to_string(pos) + ": " + why);
  }
  std::uint8_t u8() {
    if (pos >= b.size()) fail("truncated");
    return b[pos++];
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint64_t lf() {
    std::uint32_t k = 0;
    for (int i = 0; i < 4; ++i) k = (k << 8) | u8();
    if (k == 0 || k > 8) fail("unsupported length field width");
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i < k; ++i) v = (v << 8) | u8();
    if (nbytes(BigInt(v)) != k) fail("non-minimal length field");
    return v;
  }
};

ArrivalInfo read_arrival(Reader& r) {
  std::uint64_t len = r.lf();
  std::size_t start = r.pos;
  ArrivalInfo a;
  a.degree = r.u64();
  std::uint8_t moved = r.u8();
  if (moved > 1) r.fail("bad arrival flag");
  a.moved = moved == 1;
  if (a.moved) {
    a.taken = r.u64();
    a.entry = r.u64();
  }
  if (r.pos - start != len) r.fail("arrival length mismatch");
  if (a.degree == 0) r.fail("zero degree");
  return a;
}

Memory read_memory(Reader& r);

Memory read_sized_memory(Reader& r) {
  std::uint64_t len = r.lf();
  std::size_t start = r.pos;
  Memory m = read_memory(r);
  if (r.pos - start != len) r.fail("memory length mismatch");
  return m;
}

Memory read_memory(Reader& r) {
  std::vector<std::pair<std::size_t, std::uint64_t>> levels;  // start of prev, declared prev length
  while (true) {
    std::uint8_t tag = r.u8();
    if (tag == 0) break;
    if (tag != 1) r.fail("bad tag");
    std::uint64_t len = r.lf();
    levels.push_back({r.pos, len});
  }
  std::uint64_t label = r.u64();
  if (label == 0) r.fail("zero label");
  Memory m = Memory::leaf(label);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (r.pos - it->first != it->second) r.fail("prev length mismatch");
    ArrivalInfo a = read_arrival(r);
    std::uint64_t mlen = r.lf();
    std::size_t mstart = r.pos;
    std::uint64_t count = r.u64();
    std::vector<Memory::Met> met;
    for (std::uint64_t i = 0; i < count; ++i) {
      ArrivalInfo pa = read_arrival(r);
      Memory pm = read_sized_memory(r);
      met.push_back({pa, pm});
    }
    if (r.pos - mstart != mlen) r.fail("met length mismatch");
    {
      std::lock_guard lock(order_mutex());
      for (std::size_t i = 1; i < met.size(); ++i)
        if (cmp_pair(met[i - 1], met[i]) >= 0) r.fail("met set not in canonical order");
    }
    m = Memory::extend(m, a, std::move(met));
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> encode(const Memory& m) {
  std::lock_guard lock(order_mutex());
  if (length_of(np(m)) > kMaxEncodeBytes) throw MemoryError("encoding too large to materialize");
  std::vector<std::uint8_t> out;
  put_memory(out, np(m));
  return out;
}

Memory decode(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  Memory m = read_memory(r);
  if (r.pos != bytes.size()) r.fail("trailing bytes");
  return m;
}

BigInt encoded_length(const Memory& m) {
  std::lock_guard lock(order_mutex());
  return length_of(np(m));
}

std::strong_ordering compare_f(const Memory& a, const Memory& b) {
  if (a == b) return std::strong_ordering::equal;
  std::lock_guard lock(order_mutex());
  return to_ordering(compare_f_locked(np(a), np(b)));
}

std::strong_ordering compare(const Memory& a0, const Memory& b0) {
  NodeP a = np(a0);
  NodeP b = np(b0);
  while (true) {
    if (a == b) return std::strong_ordering::equal;
    if (a->rank != b->rank) return a->rank <=> b->rank;
    if (a->rank == 0) return a->label <=> b->label;  // equal-length LEAF encodings
    if (a->prev == b->prev) break;
    a = np(a->prev);
    b = np(b->prev);
  }
  std::lock_guard lock(order_mutex());
  return to_ordering(sgn(compare_f_locked(a, b)));
}

std::string describe(const Memory& m, std::size_t max_bytes) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "r%llu#%016llx", static_cast<unsigned long long>(m.rank()),
                static_cast<unsigned long long>(m.hash()));
  std::string s = buf;
  if (max_bytes > 0 && encoded_length(m) <= max_bytes) {
    s += ':';
    for (auto byte : encode(m)) {
      std::snprintf(buf, sizeof buf, "%02x", byte);
      s += buf;
    }
  }
  return s;
}

}  // namespace gathering
