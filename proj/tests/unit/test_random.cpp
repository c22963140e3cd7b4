#include <gtest/gtest.h>

#include <set>
#include <string>

#include "ed4/random.hpp"

using namespace ed4;

TEST(DeriveStream, SameKeySameDraws) {
  RandomStream a = derive_stream(7, "face_12");
  RandomStream b = derive_stream(7, "face_12");
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(DeriveStream, DistinctIdsDiverge) {
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 10000; ++i) {
    RandomStream s = derive_stream(7, "id_" + std::to_string(i));
    firsts.insert(s.next());
  }
  EXPECT_EQ(firsts.size(), 10000u);
}

TEST(DeriveStream, SeedChangesEveryStream) {
  for (int i = 0; i < 200; ++i) {
    const std::string id = "x" + std::to_string(i);
    RandomStream a = derive_stream(1, id);
    RandomStream b = derive_stream(2, id);
    bool differ = false;
    for (int k = 0; k < 10 && !differ; ++k) differ = a.next() != b.next();
    EXPECT_TRUE(differ) << id;
  }
}

TEST(StableHash, FrozenValues) {
  // Pinned so a change to the hashing shows up as a test failure, not as
  // silently different datasets.
  EXPECT_EQ(stable_hash(0, ""), stable_hash(0, ""));
  EXPECT_NE(stable_hash(0, "a"), stable_hash(1, "a"));
  EXPECT_NE(stable_hash(0, "ab"), stable_hash(0, "ba"));
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(RandomStream, UniformRanges) {
  RandomStream rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform(45.0, 315.0);
    ASSERT_GE(v, 45.0);
    ASSERT_LT(v, 315.0);
    ASSERT_LT(rng.below(7), 7u);
  }
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(RandomStream, BelowIsUnbiased) {
  RandomStream rng(6);
  std::vector<int> counts(6);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[rng.below(6)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(draws), 1.0 / 6.0, 0.01);
}

TEST(RandomStream, NormalMoments) {
  RandomStream rng(8);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
