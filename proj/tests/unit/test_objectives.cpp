#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ed4/error.hpp"
#include "ed4/objectives.hpp"
#include "ed4/random.hpp"

using namespace ed4;

TEST(BceLoss, AnchorValues) {
  EXPECT_LE(bce_loss({1.0, 1.0}), 1e-6);
  EXPECT_NEAR(bce_loss({0.5, 1.0}), 0.693147, 1e-6);
  EXPECT_NEAR(bce_loss({0.5, 1.0}), std::log(2.0), 1e-15);
  // Binary entropy of 0.7 in nats.
  EXPECT_NEAR(bce_loss({0.7, 0.7}), -(0.7 * std::log(0.7) + 0.3 * std::log(0.3)), 1e-15);
  EXPECT_NEAR(bce_loss({0.7, 0.7}), 0.610864, 1e-6);
}

TEST(BceLoss, ClampsSaturatedPredictions) {
  EXPECT_TRUE(std::isfinite(bce_loss({0.0, 1.0})));
  EXPECT_NEAR(bce_loss({0.0, 1.0}), -std::log(kPredictionClamp), 1e-9);
  EXPECT_NEAR(bce_loss({1.0, 0.0}), -std::log(kPredictionClamp), 1e-6);
  EXPECT_GE(bce_loss({1.0, 1.0}), 0.0);
}

TEST(BceLoss, RejectsInvalidInputs) {
  EXPECT_THROW(bce_loss({std::nan(""), 1.0}), DomainError);
  EXPECT_THROW(bce_loss({0.5, std::nan("")}), DomainError);
  EXPECT_THROW(bce_loss({0.5, 1.5}), DomainError);
}

TEST(BceLoss, MonotoneInPrediction) {
  double prev1 = bce_loss({1e-4, 1.0}), prev0 = bce_loss({1e-4, 0.0});
  for (int i = 2; i < 10000; ++i) {
    const double yp = i * 1e-4;
    ASSERT_LT(bce_loss({yp, 1.0}), prev1);
    ASSERT_GT(bce_loss({yp, 0.0}), prev0);
    prev1 = bce_loss({yp, 1.0});
    prev0 = bce_loss({yp, 0.0});
  }
}

TEST(BceLoss, LabelFlipSymmetry) {
  RandomStream rng(91);
  for (int t = 0; t < 1000; ++t) {
    const double y = rng.uniform();
    const double yp = rng.uniform(1e-3, 1 - 1e-3);
    EXPECT_NEAR(bce_loss({yp, y}), bce_loss({1 - yp, 1 - y}), 1e-12);
  }
}

TEST(BceLoss, SoftTargetMinimisedAtTarget) {
  for (int k = 0; k <= 20; ++k) {
    const double y = k / 20.0;
    int best = 1;
    for (int i = 1; i < 1000; ++i) {
      if (bce_loss({i / 1000.0, y}) < bce_loss({best / 1000.0, y})) best = i;
    }
    const int want = std::clamp(k * 50, 1, 999);
    EXPECT_EQ(best, want) << "y=" << y;
  }
}

TEST(BatchMean, Examples) {
  EXPECT_EQ(batch_mean(std::vector<double>{1.0}), 1.0);
  EXPECT_EQ(batch_mean(std::vector<double>{0.0, 2.0}), 1.0);
  EXPECT_THROW(batch_mean(std::vector<double>{}), DomainError);
  RandomStream rng(92);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(1 + rng.below(30));
    for (auto& x : v) x = rng.uniform(-5, 5);
    const double m = batch_mean(v);
    for (std::size_t i = v.size() - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
    EXPECT_NEAR(batch_mean(v), m, 1e-12);
  }
}
