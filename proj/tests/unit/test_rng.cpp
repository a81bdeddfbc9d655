// The random streams are part of the output contract: the same seed must give
// the same draws on every platform.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "psm/rng.hpp"

using psm::NormalSampler;
using psm::SplitMix64;

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.next(), 16408922859458223821ULL);
}

TEST(SplitMix64, SeedZero) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 16294208416658607535ULL);
  EXPECT_EQ(rng.next(), 7960286522194355700ULL);
  EXPECT_EQ(rng.next(), 487617019471545679ULL);
}

TEST(SplitMix64, Uniform) {
  SplitMix64 rng(42);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.7415648787718233);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.1599103928769201);
  EXPECT_DOUBLE_EQ(rng.uniform(), 0.27860113025513866);
}

TEST(SplitMix64, UniformIndexStaysInRange) {
  SplitMix64 rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto k = rng.uniform_index(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_EQ(rng.uniform_index(1), 0u);
}

TEST(NormalSampler, BoxMullerPair) {
  SplitMix64 rng(42);
  NormalSampler normal(rng);
  EXPECT_NEAR(normal(), 0.8822489062222688, 1e-15);
  EXPECT_NEAR(normal(), 1.388473285287707, 1e-15);
}

TEST(NormalSampler, Moments) {
  SplitMix64 rng(3);
  NormalSampler normal(rng);
  const int n = 200000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double z = normal();
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(ss / n, 1.0, 0.01);
}
