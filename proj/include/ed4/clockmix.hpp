#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ed4/geometry.hpp"
#include "ed4/image.hpp"
#include "ed4/random.hpp"

namespace ed4 {

inline constexpr int kRealLabel = 0;
inline constexpr int kFakeLabel = 1;

struct LabeledImage {
  Image pixels;
  int label = kRealLabel;
  std::optional<double> soft_label;
};

// A reproducible ClockMix plan. Source k (k >= 1) is pasted over the running
// composite inside the sector M_base <= sweep_angles[k - 1].
struct MixRecipe {
  std::vector<std::string> source_ids;
  std::vector<double> sweep_angles;  // strictly decreasing, one per pasted source
  double rho_base = 0.0;             // shared across every fold step
  FaceCenter center;
  // Per-step bases; empty unless the recipe was sampled with shared_base off.
  std::vector<double> step_bases;

  std::size_t source_count() const noexcept { return sweep_angles.size() + 1; }
  double base_for_step(std::size_t step) const {
    return step_bases.empty() ? rho_base : step_bases.at(step);
  }
  // Checks angle count against n, strict descent, angles in (0, 360) and
  // bases in [0, 360). Throws DomainError.
  void validate(std::size_t n) const;
};

struct RecipeSampling {
  double angle_min = 45.0;
  double angle_max = 315.0;
  double min_sector = 30.0;
  int max_retries = 1000;
  bool shared_base = true;
};

// Pixels from `a` where M_base > rho, from `b` where M_base <= rho. The output
// label is mix_label_hard({a.label, b.label}).
LabeledImage clockmix_pair(const LabeledImage& a, const LabeledImage& b, double rho,
                           double rho_base, FaceCenter center);

// Left fold of clockmix_pair over `images` following `recipe`.
LabeledImage clockmix_n(std::span<const LabeledImage> images, const MixRecipe& recipe);

// Composites the pixels only; labels are left to the caller. Used by replay.
Image clockmix_pixels(std::span<const Image* const> images, const MixRecipe& recipe);

// 1 - prod(1 - y_k): fake if any source is fake.
int mix_label_hard(std::span<const int> labels);

// lambda * y_a + (1 - lambda) * y_b.
double mix_label_soft(int y_a, int y_b, double lambda);

// Soft label of an n-way mix, weighting each source by its nominal arc
// fraction: source k owns (angle_{k+1}, angle_k] with angle_0 = 360 and
// angle_n = 0. For n = 2 this is mix_label_soft with lambda = (360 - rho) / 360.
double mix_label_soft_n(std::span<const int> labels, std::span<const double> sweep_angles);

// Draws n - 1 angles uniformly in [angle_min, angle_max], sorted descending,
// redrawn until consecutive gaps are >= min_sector, then one base uniform in
// [0, 360). Falls back to evenly spaced angles when retries run out.
// source_ids and center are left for the caller.
MixRecipe sample_recipe(RandomStream& rng, int n_sources, const RecipeSampling& config);

}  // namespace ed4
