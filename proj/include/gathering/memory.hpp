#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gathering {

using BigInt = boost::multiprecision::cpp_int;

// (deg(v), port(u,v), port(v,u)) for an agent that entered v from u, or
// (deg(v), NONE, NONE).
struct ArrivalInfo {
  std::uint64_t degree = 0;
  bool moved = false;
  std::uint64_t taken = 0;  // port(u,v), taken at u
  std::uint64_t entry = 0;  // port(v,u), the port of entry at v

  static ArrivalInfo stayed(std::uint64_t degree) { return {degree, false, 0, 0}; }
  static ArrivalInfo entered(std::uint64_t degree, std::uint64_t taken, std::uint64_t entry) {
    return {degree, true, taken, entry};
  }
  std::optional<std::uint64_t> entry_port() const {
    return moved ? std::optional<std::uint64_t>(entry) : std::nullopt;
  }
  auto operator<=>(const ArrivalInfo&) const = default;
};

class MemoryNode;

// Persistent, hash-consed memory value. Two Memory handles are structurally
// equal iff they point to the same node.
class Memory {
public:
  struct Met;

  Memory() = default;

  static Memory leaf(std::uint64_t label);
  static Memory extend(const Memory& prev, const ArrivalInfo& arrival, std::vector<Met> met);

  bool valid() const { return node_ != nullptr; }
  bool is_leaf() const;
  std::uint64_t rank() const;
  std::uint64_t label() const;  // label stored in the underlying LEAF
  Memory prev() const;
  const ArrivalInfo& arrival() const;
  const std::vector<Met>& met() const;
  std::uint64_t hash() const;

  // Memory at `layers` rounds earlier (stops at the LEAF).
  Memory unwind(std::uint64_t layers) const;

  bool operator==(const Memory& o) const { return node_ == o.node_; }
  const MemoryNode* id() const { return node_.get(); }

private:
  explicit Memory(std::shared_ptr<const MemoryNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const MemoryNode> node_;
  friend class MemoryNode;
};

struct Memory::Met {
  ArrivalInfo arrival;
  Memory memory;
};

class MemoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Byte layout:
//   LEAF = 0x00 | u64be(label)
//   NODE = 0x01 | LP(prev) | LP(arrival) | LP(met)
//   LP(x) = u32be(k) | length of x in k big-endian bytes (k minimal, >= 1) | x
//   arrival = u64be(degree) | u8(moved) [| u64be(taken) | u64be(entry)]
//   met = u64be(count) | pairs sorted bytewise, pair = LP(arrival) | LP(memory)
// LP length fields order bytewise the same way as numerically, so bytewise
// order of encodings equals the order of f(x) = value of 0x01|encode(x)
// restricted to equal lengths.
std::vector<std::uint8_t> encode(const Memory& m);
Memory decode(const std::vector<std::uint8_t>& bytes);
BigInt encoded_length(const Memory& m);

// f(a) vs f(b), with f(x) the natural number 0x01 | encode(x).
std::strong_ordering compare_f(const Memory& a, const Memory& b);

// The strict total order on memories.
std::strong_ordering compare(const Memory& a, const Memory& b);

std::string describe(const Memory& m, std::size_t max_bytes = 64);

}  // namespace gathering
