#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "patternforge/rng.hpp"

using patternforge::derive_seed;
using patternforge::fnv1a64;
using patternforge::SplitMix64;

TEST(SplitMix64, MatchesReferenceStreamForSeedZero) {
  // Reference outputs of the published splitmix64.c with x = 0.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
  EXPECT_EQ(rng.next(), 0xf88bb8a8724c81ecULL);
}

TEST(Fnv1a64, ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(DeriveSeed, Deterministic) {
  EXPECT_EQ(derive_seed(0, "T0001", 0), derive_seed(0, "T0001", 0));
  EXPECT_NE(derive_seed(0, "T0001", 0), derive_seed(0, "T0001", 1));
  EXPECT_NE(derive_seed(1, "T0001", 0), derive_seed(0, "T0001", 0));
  static_assert(derive_seed(3, "x", 4) == derive_seed(3, "x", 4));
}

TEST(DeriveSeed, NoCollisionsOverAMillionIndices) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t i = 0; i < 1'000'000; ++i) seen.insert(derive_seed(0, "T0001", i));
  EXPECT_EQ(seen.size(), 1'000'000u);
}

TEST(DeriveSeed, NoCollisionsAcrossGlobalSeeds) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t g = 0; g < 1000; ++g) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(g, "T0001", i));
  }
  EXPECT_EQ(seen.size(), 1'000'000u);
}

TEST(SplitMix64, UniformStaysInHalfOpenRange) {
  SplitMix64 rng(42);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(SplitMix64, UniformIntIsInclusiveAndBalanced) {
  SplitMix64 rng(7);
  std::array<int, 7> counts{};
  constexpr int n = 70'000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    ++counts[static_cast<std::size_t>(v + 3)];
  }
  // Chi-square with 6 dof; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);
  EXPECT_EQ(rng.uniform_int(5, 5), 5);
}

TEST(SplitMix64, NormalMoments) {
  SplitMix64 rng(9);
  constexpr int n = 200'000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(SplitMix64, SplitDoesNotAdvanceParent) {
  SplitMix64 a(11), b(11);
  auto child = a.split("pixels");
  (void)child.next();
  EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(SplitMix64(11).split("a").next(), SplitMix64(11).split("b").next());
}

TEST(SplitMix64, ShuffleIsASeededPermutation) {
  std::vector<int> v(50), w(50);
  std::iota(v.begin(), v.end(), 0);
  w = v;
  SplitMix64(5).shuffle(std::span<int>(v));
  SplitMix64(5).shuffle(std::span<int>(w));
  EXPECT_EQ(v, w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}
