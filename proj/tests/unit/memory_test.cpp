#include <gtest/gtest.h>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "gathering/memory.hpp"

using namespace gathering;

namespace {

using Rng = boost::random::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return boost::random::uniform_int_distribution<int>(lo, hi)(rng); }

ArrivalInfo random_arrival(Rng& rng) {
  std::uint64_t deg = static_cast<std::uint64_t>(uniform(rng, 1, 4));
  if (uniform(rng, 0, 1)) return ArrivalInfo::stayed(deg);
  return ArrivalInfo::entered(deg, static_cast<std::uint64_t>(uniform(rng, 0, 3)), static_cast<std::uint64_t>(uniform(rng, 0, 3)));
}

Memory random_memory(Rng& rng, int depth) {
  Memory m = Memory::leaf(static_cast<std::uint64_t>(uniform(rng, 1, 3)));
  int rank = uniform(rng, 0, depth);
  for (int r = 0; r < rank; ++r) {
    std::vector<Memory::Met> met;
    for (int i = uniform(rng, 0, depth > 1 ? 2 : 1); i > 0; --i)
      met.push_back({random_arrival(rng), random_memory(rng, depth - 1)});
    m = Memory::extend(m, random_arrival(rng), met);
  }
  return m;
}

// f(x): natural number with big-endian digits 0x01 | encode(x).
BigInt f_ref(const Memory& m) {
  BigInt v = 1;
  for (auto b : encode(m)) v = (v << 8) | b;
  return v;
}

std::strong_ordering compare_ref(const Memory& a, const Memory& b) {
  if (a.rank() != b.rank()) return a.rank() <=> b.rank();
  if (a.rank() == 0 || a.prev() == b.prev()) {
    BigInt fa = f_ref(a), fb = f_ref(b);
    return fa < fb ? std::strong_ordering::less : (fb < fa ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  return compare_ref(a.prev(), b.prev());
}

}  // namespace

TEST(Memory, Rank) {
  auto l = Memory::leaf(5);
  EXPECT_EQ(l.rank(), 0u);
  auto n = Memory::extend(l, ArrivalInfo::stayed(2), {});
  EXPECT_EQ(n.rank(), 1u);
  auto m = Memory::extend(Memory::extend(n, ArrivalInfo::stayed(2), {}), ArrivalInfo::stayed(2), {});
  EXPECT_EQ(m.rank(), 3u);
  EXPECT_EQ(m.label(), 5u);
  EXPECT_EQ(m.unwind(2), n);
  EXPECT_EQ(m.unwind(10), l);
}

TEST(Memory, MetMayMixRanks) {
  auto deep = Memory::extend(Memory::extend(Memory::leaf(1), ArrivalInfo::stayed(2), {}), ArrivalInfo::stayed(2), {});
  auto m = Memory::extend(deep, ArrivalInfo::stayed(2), {{ArrivalInfo::stayed(2), Memory::leaf(2)}});
  EXPECT_EQ(m.rank(), 3u);
  EXPECT_EQ(decode(encode(m)), m);
}

TEST(Memory, LabelsEncodeDistinctly) {
  EXPECT_NE(encode(Memory::leaf(1)), encode(Memory::leaf(2)));
  EXPECT_EQ(encode(Memory::leaf(1)), (std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0, 0, 1}));
}

TEST(Memory, SetOrderIsCanonical) {
  auto a = Memory::leaf(1), b = Memory::leaf(2), c = Memory::extend(Memory::leaf(3), ArrivalInfo::stayed(1), {});
  ArrivalInfo s = ArrivalInfo::stayed(3), e = ArrivalInfo::entered(3, 1, 0);
  auto m1 = Memory::extend(c, e, {{s, a}, {e, b}, {s, b}});
  auto m2 = Memory::extend(c, e, {{s, b}, {e, b}, {s, a}, {s, a}});
  EXPECT_EQ(m1, m2);
  EXPECT_EQ(encode(m1), encode(m2));
  EXPECT_EQ(m1.met().size(), 3u);
}

TEST(Memory, RoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    auto m = random_memory(rng, 4);
    auto bytes = encode(m);
    EXPECT_EQ(decode(bytes), m);
    EXPECT_EQ(encoded_length(m), bytes.size());
  }
}

TEST(Memory, DecodeRejectsGarbage) {
  auto bytes = encode(Memory::extend(Memory::leaf(1), ArrivalInfo::stayed(2), {}));
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode(truncated), MemoryError);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(decode(extra), MemoryError);
}

TEST(Memory, CompareBasics) {
  auto l = Memory::leaf(9);
  auto r2 = Memory::extend(Memory::extend(Memory::leaf(1), ArrivalInfo::stayed(1), {}), ArrivalInfo::stayed(1), {});
  EXPECT_EQ(compare(l, r2), std::strong_ordering::less);
  EXPECT_EQ(compare(r2, r2), std::strong_ordering::equal);
  EXPECT_EQ(compare(Memory::leaf(1), Memory::leaf(2)), std::strong_ordering::less);
}

// Lexicographic comparison of length-prefixed encodings equals numeric
// comparison of f.
TEST(Memory, CompareFMatchesNumericValue) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_memory(rng, 3), b = random_memory(rng, 3);
    BigInt fa = f_ref(a), fb = f_ref(b);
    auto expect = fa < fb ? std::strong_ordering::less : (fb < fa ? std::strong_ordering::greater : std::strong_ordering::equal);
    EXPECT_EQ(compare_f(a, b), expect);
  }
}

TEST(Memory, CompareMatchesReference) {
  Rng rng(13);
  int unequal_prev = 0;
  for (int i = 0; i < 1000; ++i) {
    auto base = random_memory(rng, 2);
    auto a = base, b = base;
    // Shared prefix so that ties at equal rank are exercised.
    for (int r = uniform(rng, 1, 3); r > 0; --r) {
      a = Memory::extend(a, random_arrival(rng), {{random_arrival(rng), random_memory(rng, 1)}});
      b = Memory::extend(b, uniform(rng, 0, 2) ? a.arrival() : random_arrival(rng), {{random_arrival(rng), random_memory(rng, 1)}});
    }
    if (a.rank() > 0 && a.prev() != b.prev()) ++unequal_prev;
    EXPECT_EQ(compare(a, b), compare_ref(a, b));
    if (a.rank() > 0 && a.rank() == b.rank() && a.prev() != b.prev()) EXPECT_EQ(compare(a, b), compare(a.prev(), b.prev()));
  }
  EXPECT_GT(unequal_prev, 100);
}

TEST(Memory, TotalOrderOnSample) {
  Rng rng(17);
  std::vector<Memory> xs;
  while (xs.size() < 50) {
    auto m = random_memory(rng, 3);
    if (std::find(xs.begin(), xs.end(), m) == xs.end()) xs.push_back(m);
  }
  for (auto& a : xs)
    for (auto& b : xs) {
      auto ab = compare(a, b);
      EXPECT_EQ(ab == std::strong_ordering::equal, a == b);
      EXPECT_EQ(ab, 0 <=> (compare(b, a) <=> 0));
      for (auto& c : xs)
        if (ab < 0 && compare(b, c) < 0) EXPECT_TRUE(compare(a, c) < 0);
    }
}

TEST(Memory, InterningGivesStructuralEquality) {
  Rng r1(5), r2(5);
  for (int i = 0; i < 100; ++i) {
    auto a = random_memory(r1, 3);
    auto b = random_memory(r2, 3);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.hash(), b.hash());
  }
}

TEST(Memory, LongChainsReleaseIteratively) {
  Memory m = Memory::leaf(1);
  for (int i = 0; i < 300000; ++i) m = Memory::extend(m, ArrivalInfo::stayed(2), {});
  EXPECT_EQ(m.rank(), 300000u);
  m = Memory();
}
