#include "ed4/clockmix.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {
namespace {

void check_label(int label) {
  if (label != kRealLabel && label != kFakeLabel) {
    throw DomainError("label must be 0 or 1, got " + std::to_string(label));
  }
}

// dst <- src wherever wrap(M - rho_base) <= rho. Same comparison as
// sector_mask(rebase_angles(M, rho_base), rho), fused to avoid temporaries.
void paste_sector(Image& dst, const Image& src, const AngleMatrix& angles, double rho_base,
                  double rho) {
  const auto values = angles.values();
  const std::uint8_t* in = src.data().data();
  std::uint8_t* out = dst.data().data();
  for (std::size_t k = 0; k < values.size(); ++k) {
    double a = values[k] - rho_base;
    if (a < 0.0) a += 360.0;
    if (a >= 360.0) a = 0.0;
    if (a <= rho) {
      const std::size_t o = k * Image::kChannels;
      out[o] = in[o];
      out[o + 1] = in[o + 1];
      out[o + 2] = in[o + 2];
    }
  }
}

void check_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw DomainError("ClockMix sources differ in size: " + std::to_string(a.height()) + "x" +
                      std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                      std::to_string(b.width()));
  }
}

}  // namespace

void MixRecipe::validate(std::size_t n) const {
  if (n == 0) throw DomainError("a mix needs at least one source");
  if (sweep_angles.size() + 1 != n) {
    throw DomainError("recipe has " + std::to_string(sweep_angles.size()) +
                      " sweep angles for " + std::to_string(n) + " sources");
  }
  if (!source_ids.empty() && source_ids.size() != n) {
    throw DomainError("recipe names " + std::to_string(source_ids.size()) + " sources, got " +
                      std::to_string(n) + " images");
  }
  for (std::size_t k = 0; k < sweep_angles.size(); ++k) {
    const double rho = sweep_angles[k];
    if (!(rho > 0.0 && rho < 360.0)) {
      throw DomainError("sweep angle " + std::to_string(rho) + " outside (0, 360)");
    }
    if (k > 0 && !(rho < sweep_angles[k - 1])) {
      throw DomainError("sweep angles must be strictly decreasing");
    }
  }
  auto check_base = [](double b) {
    if (!(b >= 0.0 && b < 360.0)) {
      throw DomainError("rho_base must lie in [0, 360), got " + std::to_string(b));
    }
  };
  check_base(rho_base);
  if (!step_bases.empty()) {
    if (step_bases.size() != sweep_angles.size()) {
      throw DomainError("step_bases must have one entry per sweep angle");
    }
    for (double b : step_bases) check_base(b);
  }
}

LabeledImage clockmix_pair(const LabeledImage& a, const LabeledImage& b, double rho,
                           double rho_base, FaceCenter center) {
  check_same_shape(a.pixels, b.pixels);
  if (!(rho > 0.0 && rho < 360.0)) {
    throw DomainError("sweep angle must lie in (0, 360), got " + std::to_string(rho));
  }
  if (!(rho_base >= 0.0 && rho_base < 360.0)) {
    throw DomainError("rho_base must lie in [0, 360), got " + std::to_string(rho_base));
  }
  const int labels[] = {a.label, b.label};
  LabeledImage out{a.pixels, mix_label_hard(labels), std::nullopt};
  const auto angles =
      cached_angle_matrix(ImageGrid{a.pixels.height(), a.pixels.width()}, center);
  paste_sector(out.pixels, b.pixels, *angles, rho_base, rho);
  return out;
}

Image clockmix_pixels(std::span<const Image* const> images, const MixRecipe& recipe) {
  recipe.validate(images.size());
  for (const Image* img : images) check_same_shape(*images.front(), *img);
  Image out = *images.front();
  if (images.size() == 1) return out;
  const auto angles = cached_angle_matrix(ImageGrid{out.height(), out.width()}, recipe.center);
  for (std::size_t k = 1; k < images.size(); ++k) {
    paste_sector(out, *images[k], *angles, recipe.base_for_step(k - 1),
                 recipe.sweep_angles[k - 1]);
  }
  return out;
}

LabeledImage clockmix_n(std::span<const LabeledImage> images, const MixRecipe& recipe) {
  std::vector<const Image*> pixels;
  std::vector<int> labels;
  pixels.reserve(images.size());
  labels.reserve(images.size());
  for (const auto& img : images) {
    pixels.push_back(&img.pixels);
    labels.push_back(img.label);
  }
  recipe.validate(images.size());
  if (images.size() == 1) return images.front();
  return LabeledImage{clockmix_pixels(pixels, recipe), mix_label_hard(labels), std::nullopt};
}

int mix_label_hard(std::span<const int> labels) {
  if (labels.empty()) throw DomainError("mix_label_hard needs at least one label");
  int keep_real = 1;
  for (int y : labels) {
    check_label(y);
    keep_real *= 1 - y;
  }
  return 1 - keep_real;
}

double mix_label_soft(int y_a, int y_b, double lambda) {
  check_label(y_a);
  check_label(y_b);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  return lambda * y_a + (1.0 - lambda) * y_b;
}

double mix_label_soft_n(std::span<const int> labels, std::span<const double> sweep_angles) {
  if (labels.empty()) throw DomainError("mix_label_soft_n needs at least one label");
  if (sweep_angles.size() + 1 != labels.size()) {
    throw DomainError("soft label needs one sweep angle per pasted source");
  }
  if (labels.size() == 1) {
    check_label(labels[0]);
    return labels[0];
  }
  if (labels.size() == 2) {
    return mix_label_soft(labels[0], labels[1], (360.0 - sweep_angles[0]) / 360.0);
  }
  double upper = 360.0;
  double soft = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    check_label(labels[k]);
    const double lower = k < sweep_angles.size() ? sweep_angles[k] : 0.0;
    soft += labels[k] * (upper - lower) / 360.0;
    upper = lower;
  }
  return soft;
}

MixRecipe sample_recipe(RandomStream& rng, int n_sources, const RecipeSampling& config) {
  if (n_sources < 1 || n_sources > 4) {
    throw DomainError("number of mixed sources must be in {1, 2, 3, 4}, got " +
                      std::to_string(n_sources));
  }
  if (!(config.angle_min > 0.0 && config.angle_max < 360.0 &&
        config.angle_min < config.angle_max)) {
    throw DomainError("sweep angle range must satisfy 0 < min < max < 360");
  }
  MixRecipe recipe;
  const int count = n_sources - 1;
  const double span_deg = config.angle_max - config.angle_min;

  std::vector<double> angles(static_cast<std::size_t>(count));
  bool accepted = count == 0;
  for (int attempt = 0; !accepted && attempt < config.max_retries; ++attempt) {
    for (double& a : angles) a = rng.uniform(config.angle_min, config.angle_max);
    std::sort(angles.begin(), angles.end(), std::greater<>());
    accepted = true;
    for (int k = 1; k < count; ++k) {
      if (angles[k - 1] - angles[k] < config.min_sector) {
        accepted = false;
        break;
      }
    }
  }
  if (!accepted) {
    for (int k = 0; k < count; ++k) {
      angles[k] = config.angle_max - (k + 0.5) * span_deg / count;
    }
  }
  recipe.sweep_angles = std::move(angles);
  recipe.rho_base = rng.uniform(0.0, 360.0);
  if (!config.shared_base && count > 0) {
    recipe.step_bases.push_back(recipe.rho_base);
    for (int k = 1; k < count; ++k) recipe.step_bases.push_back(rng.uniform(0.0, 360.0));
  }
  return recipe;
}

}  // namespace ed4
