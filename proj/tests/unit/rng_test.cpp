#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "pbnssa/rng.hpp"

using pbnssa::philox4x32;
using pbnssa::RandomStream;

// Known-answer vectors of the Random123 distribution.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedAndIdReproduce) {
  RandomStream a(42, 3);
  RandomStream b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u32(), b.next_u32());
}

TEST(RandomStream, StreamsDoNotOverlap) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t id = 0; id < 8; ++id) {
    RandomStream s(5, id);
    for (int i = 0; i < 2000; ++i) ASSERT_TRUE(seen.insert(s.next_u64()).second);
  }
}

TEST(RandomStream, DifferentSeedsDiffer) {
  RandomStream a(1, 0);
  RandomStream b(2, 0);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u32() == b.next_u32();
  EXPECT_LT(equal, 3);
}

TEST(RandomStream, UniformRanges) {
  RandomStream s(9, 1);
  double sum = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = s.uniform_open_low();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / count, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / count));
}

TEST(RandomStream, BelowIsUnbiased) {
  RandomStream s(10, 2);
  std::array<int, 7> hist{};
  const int count = 70000;
  for (int i = 0; i < count; ++i) {
    const auto x = s.below(7);
    ASSERT_LT(x, 7U);
    ++hist[x];
  }
  double chi2 = 0.0;
  for (const int h : hist) chi2 += (h - count / 7.0) * (h - count / 7.0) / (count / 7.0);
  EXPECT_LT(chi2, 22.46);  // 0.999 quantile, 6 degrees of freedom
  EXPECT_EQ(s.between(4, 4), 4U);
}
