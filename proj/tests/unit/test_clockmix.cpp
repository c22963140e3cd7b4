#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "ed4/clockmix.hpp"
#include "ed4/error.hpp"
#include "test_support.hpp"

using namespace ed4;
using ed4::testing::random_image;

namespace {

LabeledImage constant(int side, std::uint8_t value, int label) {
  return LabeledImage{constant_image(side, side, value), label, {}};
}

double mean_value(const Image& image) {
  const auto d = image.data();
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

// Share of pixels, over the full frame or the inscribed disc, holding each value.
std::vector<double> value_shares(const Image& image, const std::vector<std::uint8_t>& values,
                                 bool disc) {
  const int cy = image.height() / 2, cx = image.width() / 2;
  const long long r = std::min(cx, cy);
  std::vector<double> counts(values.size(), 0.0);
  double total = 0.0;
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      const long long di = i - cy, dj = j - cx;
      if (disc && di * di + dj * dj > r * r) continue;
      total += 1.0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (image.pixel(i, j)[0] == values[k]) counts[k] += 1.0;
      }
    }
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace

TEST(ClockMixPair, QuarterSweepMean) {
  const LabeledImage out =
      clockmix_pair(constant(101, 10, 0), constant(101, 20, 0), 90.0, 0.0, {50, 50});
  // 2601 of 10201 pixels come from b.
  EXPECT_NEAR(mean_value(out.pixels), (10.0 * 7600 + 20.0 * 2601) / 10201.0, 1e-12);
  EXPECT_GE(mean_value(out.pixels), 12.3);
  EXPECT_LE(mean_value(out.pixels), 12.7);
}

TEST(ClockMixPair, IdenticalInputsAreUnchanged) {
  RandomStream rng(21);
  const Image image = random_image(rng, 33, 29);
  for (double rho : {10.0, 90.0, 200.0, 359.0}) {
    const LabeledImage out = clockmix_pair({image, 0, {}}, {image, 0, {}}, rho, 17.0, {14, 16});
    EXPECT_EQ(out.pixels, image);
  }
}

TEST(ClockMixPair, SelectsPerMaskWithoutBlending) {
  RandomStream rng(22);
  for (int t = 0; t < 100; ++t) {
    const int h = 8 + static_cast<int>(rng.below(40));
    const int w = 8 + static_cast<int>(rng.below(40));
    const Image a = random_image(rng, h, w);
    const Image b = random_image(rng, h, w);
    const FaceCenter c{static_cast<int>(rng.below(w)), static_cast<int>(rng.below(h))};
    const double rho = rng.uniform(1, 359);
    const double base = rng.uniform(0, 360);
    const LabeledImage out = clockmix_pair({a, 0, {}}, {b, 1, {}}, rho, base, c);
    const SectorMask mask = sector_mask(rebase_angles(compute_angle_matrix({h, w}, c), base), rho);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const std::uint8_t* want = mask.at(i, j) ? b.pixel(i, j) : a.pixel(i, j);
        ASSERT_TRUE(std::equal(want, want + 3, out.pixels.pixel(i, j)));
      }
    }
    EXPECT_EQ(out.label, 1);
  }
}

TEST(ClockMixPair, RejectsMismatchedInputs) {
  EXPECT_THROW(clockmix_pair(constant(10, 1, 0), constant(12, 1, 0), 90, 0, {5, 5}), DomainError);
  EXPECT_THROW(clockmix_pair(constant(10, 1, 0), constant(10, 1, 0), 0, 0, {5, 5}), DomainError);
  EXPECT_THROW(clockmix_pair(constant(10, 1, 0), constant(10, 1, 0), 90, 360, {5, 5}),
               DomainError);
  EXPECT_THROW(clockmix_pair(constant(10, 1, 0), constant(10, 1, 0), 90, 0, {10, 5}), DomainError);
}

TEST(ClockMixN, ThreeEqualArcsOnDisc) {
  const std::vector<std::uint8_t> values{30, 120, 210};
  const std::array<LabeledImage, 3> imgs{constant(256, 30, 0), constant(256, 120, 0),
                                         constant(256, 210, 1)};
  MixRecipe recipe{{"a", "b", "c"}, {240.0, 120.0}, 0.0, {128, 128}, {}};
  const LabeledImage out = clockmix_n(imgs, recipe);
  const auto shares = value_shares(out.pixels, values, true);
  for (double s : shares) EXPECT_NEAR(s, 1.0 / 3.0, 0.02);
  EXPECT_EQ(out.label, 1);
}

TEST(ClockMixN, FourEqualArcs) {
  const std::vector<std::uint8_t> values{5, 70, 140, 250};
  std::vector<LabeledImage> imgs;
  for (auto v : values) imgs.push_back(constant(256, v, 0));
  MixRecipe recipe{{"a", "b", "c", "d"}, {270.0, 180.0, 90.0}, 0.0, {128, 128}, {}};
  const LabeledImage out = clockmix_n(imgs, recipe);
  for (bool disc : {false, true}) {
    const auto shares = value_shares(out.pixels, values, disc);
    for (double s : shares) EXPECT_NEAR(s, 0.25, 0.02);
  }
  EXPECT_EQ(out.label, 0);
}

TEST(ClockMixN, SingleSourceIsUnchanged) {
  RandomStream rng(23);
  const LabeledImage in{random_image(rng, 20, 30), 1, {}};
  const LabeledImage images[1] = {in};
  MixRecipe recipe{{"only"}, {}, 123.0, {4, 4}, {}};
  const LabeledImage out = clockmix_n(images, recipe);
  EXPECT_EQ(out.pixels, in.pixels);
  EXPECT_EQ(out.label, 1);
}

TEST(ClockMixN, FoldMatchesRepeatedPairs) {
  RandomStream rng(24);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<LabeledImage> imgs;
    for (int k = 0; k < n; ++k) imgs.push_back({random_image(rng, 24, 32), k % 2, {}});
    MixRecipe recipe = sample_recipe(rng, n, RecipeSampling{});
    recipe.center = {static_cast<int>(rng.below(32)), static_cast<int>(rng.below(24))};
    LabeledImage running = imgs[0];
    for (int k = 1; k < n; ++k) {
      running = clockmix_pair(running, imgs[k], recipe.sweep_angles[k - 1], recipe.rho_base,
                              recipe.center);
    }
    const LabeledImage out = clockmix_n(imgs, recipe);
    EXPECT_EQ(out.pixels, running.pixels);
    EXPECT_EQ(out.label, running.label);
  }
}

TEST(ClockMixN, EverySourceKeepsPixels) {
  RandomStream rng(25);
  const std::vector<std::uint8_t> values{11, 99, 177, 233};
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<LabeledImage> imgs;
    for (int k = 0; k < n; ++k) imgs.push_back(constant(48, values[k], 0));
    MixRecipe recipe = sample_recipe(rng, n, RecipeSampling{});
    recipe.center = {24, 24};
    const LabeledImage out = clockmix_n(imgs, recipe);
    const auto shares =
        value_shares(out.pixels, std::vector<std::uint8_t>(values.begin(), values.begin() + n), false);
    EXPECT_NEAR(std::accumulate(shares.begin(), shares.end(), 0.0), 1.0, 1e-12);
    for (double s : shares) EXPECT_GT(s, 0.0);
  }
}

TEST(ClockMixN, RejectsBadRecipes) {
  const std::array<LabeledImage, 2> imgs{constant(16, 1, 0), constant(16, 2, 0)};
  EXPECT_THROW(clockmix_n(imgs, MixRecipe{{"a", "b"}, {}, 0, {8, 8}, {}}), DomainError);
  EXPECT_THROW(clockmix_n(imgs, MixRecipe{{"a", "b"}, {90, 80}, 0, {8, 8}, {}}), DomainError);
  const std::array<LabeledImage, 3> three{constant(16, 1, 0), constant(16, 2, 0),
                                          constant(16, 3, 0)};
  EXPECT_THROW(clockmix_n(three, MixRecipe{{"a", "b", "c"}, {90, 120}, 0, {8, 8}, {}}),
               DomainError);
}

TEST(ClockMixN, PerStepBasesAreHonoured) {
  const std::array<LabeledImage, 3> imgs{constant(64, 1, 0), constant(64, 2, 0),
                                         constant(64, 3, 0)};
  MixRecipe shared{{"a", "b", "c"}, {200.0, 100.0}, 40.0, {32, 32}, {}};
  MixRecipe explicit_bases = shared;
  explicit_bases.step_bases = {40.0, 40.0};
  EXPECT_EQ(clockmix_n(imgs, shared).pixels, clockmix_n(imgs, explicit_bases).pixels);
  MixRecipe rotated = shared;
  rotated.step_bases = {40.0, 220.0};
  EXPECT_NE(clockmix_n(imgs, shared).pixels, clockmix_n(imgs, rotated).pixels);
}

TEST(MixLabel, HardLabelIsOr) {
  EXPECT_EQ(mix_label_hard(std::vector<int>{0, 0}), 0);
  EXPECT_EQ(mix_label_hard(std::vector<int>{0, 1}), 1);
  EXPECT_EQ(mix_label_hard(std::vector<int>{1, 1}), 1);
  EXPECT_EQ(mix_label_hard(std::vector<int>{0, 1, 0}), 1);
  for (int n = 1; n <= 4; ++n) {
    for (int bits = 0; bits < (1 << n); ++bits) {
      std::vector<int> labels;
      bool any = false;
      for (int k = 0; k < n; ++k) {
        labels.push_back((bits >> k) & 1);
        any = any || ((bits >> k) & 1);
      }
      EXPECT_EQ(mix_label_hard(labels), any ? 1 : 0);
    }
  }
  EXPECT_THROW(mix_label_hard(std::vector<int>{}), DomainError);
  EXPECT_THROW(mix_label_hard(std::vector<int>{0, 2}), DomainError);
}

TEST(MixLabel, SoftLabelInterpolates) {
  EXPECT_DOUBLE_EQ(mix_label_soft(1, 0, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(mix_label_soft(1, 0, 1.0), 1.0);
  for (double lambda : {0.0, 0.3, 0.99}) EXPECT_DOUBLE_EQ(mix_label_soft(1, 1, lambda), 1.0);
  EXPECT_THROW(mix_label_soft(1, 0, 1.5), DomainError);
  EXPECT_THROW(mix_label_soft(1, 0, -0.1), DomainError);
}

TEST(MixLabel, SoftLabelForNSourcesUsesArcShares) {
  // Pair: lambda = (360 - rho) / 360 is the share kept by the first source.
  EXPECT_NEAR(mix_label_soft_n(std::vector<int>{1, 0}, std::vector<double>{90.0}), 0.75, 1e-15);
  EXPECT_NEAR(mix_label_soft_n(std::vector<int>{0, 1}, std::vector<double>{90.0}), 0.25, 1e-15);
  // Arcs 360-240, 240-120, 120-0 each hold a third.
  EXPECT_NEAR(mix_label_soft_n(std::vector<int>{0, 1, 1}, std::vector<double>{240.0, 120.0}),
              2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(mix_label_soft_n(std::vector<int>{1}, std::vector<double>{}), 1.0);
}

TEST(SampleRecipe, SingleSourceHasNoAngles) {
  RandomStream rng(26);
  const MixRecipe r = sample_recipe(rng, 1, RecipeSampling{});
  EXPECT_TRUE(r.sweep_angles.empty());
  EXPECT_GE(r.rho_base, 0.0);
  EXPECT_LT(r.rho_base, 360.0);
}

TEST(SampleRecipe, DeterministicForFixedSeed) {
  RandomStream a(27), b(27);
  const MixRecipe ra = sample_recipe(a, 3, RecipeSampling{});
  const MixRecipe rb = sample_recipe(b, 3, RecipeSampling{});
  EXPECT_EQ(ra.sweep_angles, rb.sweep_angles);
  EXPECT_EQ(ra.rho_base, rb.rho_base);
}

TEST(SampleRecipe, AnglesRespectRangeAndGap) {
  RandomStream rng(28);
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const MixRecipe r = sample_recipe(rng, n, RecipeSampling{});
    ASSERT_EQ(r.sweep_angles.size(), static_cast<std::size_t>(n - 1));
    for (std::size_t k = 0; k < r.sweep_angles.size(); ++k) {
      ASSERT_GE(r.sweep_angles[k], 45.0);
      ASSERT_LE(r.sweep_angles[k], 315.0);
      if (k > 0) ASSERT_GE(r.sweep_angles[k - 1] - r.sweep_angles[k], 30.0);
    }
    ASSERT_GE(r.rho_base, 0.0);
    ASSERT_LT(r.rho_base, 360.0);
  }
}

TEST(SampleRecipe, FallsBackToEvenSpacingWhenGapUnreachable) {
  RandomStream rng(29);
  RecipeSampling tight{100.0, 130.0, 20.0, 5, true};
  const MixRecipe r = sample_recipe(rng, 3, tight);
  ASSERT_EQ(r.sweep_angles.size(), 2u);
  EXPECT_GT(r.sweep_angles[0], r.sweep_angles[1]);
  EXPECT_GE(r.sweep_angles[1], 100.0);
  EXPECT_LE(r.sweep_angles[0], 130.0);
}

TEST(SampleRecipe, IndependentBasesWhenNotShared) {
  RandomStream rng(30);
  RecipeSampling cfg;
  cfg.shared_base = false;
  const MixRecipe r = sample_recipe(rng, 4, cfg);
  ASSERT_EQ(r.step_bases.size(), 3u);
  EXPECT_EQ(r.step_bases[0], r.rho_base);
  EXPECT_NO_THROW(r.validate(4));
  RandomStream rng1(30);
  EXPECT_TRUE(sample_recipe(rng1, 1, cfg).step_bases.empty());
}
