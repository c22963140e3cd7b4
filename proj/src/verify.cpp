#include "ed4/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "ed4/advscm.hpp"
#include "ed4/assignment.hpp"
#include "ed4/clockmix.hpp"
#include "ed4/error.hpp"
#include "ed4/geometry.hpp"
#include "ed4/objectives.hpp"
#include "ed4/random.hpp"
#include "ed4/shuffle.hpp"

namespace ed4 {

namespace {

constexpr std::uint64_t kVerifySeed = 0x5eed'0001;

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

using Check = std::function<CheckResult()>;

CheckResult result(bool passed, std::string detail = {}) {
  return CheckResult{{}, {}, passed, std::move(detail)};
}

// Fraction of the inscribed disc around the grid centre covered by the mask.
double disc_fraction(const SectorMask& mask, FaceCenter c, double radius) {
  std::size_t inside = 0;
  std::size_t hit = 0;
  const ImageGrid grid = mask.grid();
  for (int r = 0; r < grid.height; ++r) {
    for (int col = 0; col < grid.width; ++col) {
      const double dx = col - c.delta_x;
      const double dy = r - c.delta_y;
      if (dx * dx + dy * dy > radius * radius) continue;
      ++inside;
      hit += mask.at(r, col) ? 1 : 0;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(inside);
}

std::vector<std::pair<std::string, Check>> geometry_checks() {
  return {
      {"angles in [0, 360)",
       [] {
         RandomStream rng(kVerifySeed);
         for (int t = 0; t < 50; ++t) {
           const ImageGrid grid{1 + static_cast<int>(rng.below(64)),
                                1 + static_cast<int>(rng.below(64))};
           const FaceCenter c{static_cast<int>(rng.below(grid.width)),
                              static_cast<int>(rng.below(grid.height))};
           const AngleMatrix m = rebase_angles(compute_angle_matrix(grid, c), rng.uniform(0, 360));
           for (double a : m.values()) {
             if (!(a >= 0.0 && a < 360.0)) return result(false, format("angle %.17g", a));
           }
         }
         return result(true, "50 grids");
       }},
      {"mask and complement partition the grid",
       [] {
         RandomStream rng(kVerifySeed + 1);
         for (int t = 0; t < 50; ++t) {
           const ImageGrid grid{2 + static_cast<int>(rng.below(63)),
                                2 + static_cast<int>(rng.below(63))};
           const AngleMatrix m = rebase_angles(
               compute_angle_matrix(grid, grid_center(grid)), rng.uniform(0, 360));
           const SectorMask mask = sector_mask(m, rng.uniform(1, 359));
           const SectorMask rest = mask.complement();
           for (std::size_t i = 0; i < mask.bits().size(); ++i) {
             if (mask.bits()[i] == rest.bits()[i]) return result(false, "pixel in both or neither");
           }
         }
         return result(true, "50 masks");
       }},
      {"sector covers rho/360 of the inscribed disc",
       [] {
         RandomStream rng(kVerifySeed + 2);
         const ImageGrid grid{101, 101};
         const FaceCenter c = grid_center(grid);
         const AngleMatrix angles = compute_angle_matrix(grid, c);
         double worst = 0.0;
         for (int t = 0; t < 100; ++t) {
           const double rho = rng.uniform(1, 359);
           const SectorMask mask = sector_mask(rebase_angles(angles, rng.uniform(0, 360)), rho);
           worst = std::max(worst, std::abs(disc_fraction(mask, c, 50.0) - rho / 360.0));
         }
         return result(worst <= 0.01, format("max deviation %.5f", worst));
       }},
      {"full sweep selects every pixel",
       [] {
         const ImageGrid grid{33, 47};
         const AngleMatrix m = compute_angle_matrix(grid, grid_center(grid));
         const SectorMask mask = sector_mask(m, std::nextafter(360.0, 0.0));
         return result(mask.count() == 33u * 47u);
       }},
  };
}

std::vector<std::pair<std::string, Check>> clockmix_checks() {
  return {
      {"every pixel comes from exactly one source",
       [] {
         RandomStream rng(kVerifySeed + 10);
         const std::uint8_t values[4] = {10, 70, 140, 230};
         for (int t = 0; t < 60; ++t) {
           const int n = 2 + static_cast<int>(rng.below(3));
           const int size = 16 + static_cast<int>(rng.below(49));
           std::vector<Image> src;
           for (int k = 0; k < n; ++k) src.push_back(constant_image(size, size, values[k]));
           MixRecipe recipe = sample_recipe(rng, n, RecipeSampling{});
           recipe.center = FaceCenter{static_cast<int>(rng.below(size)),
                                      static_cast<int>(rng.below(size))};
           std::vector<const Image*> ptrs;
           for (const Image& im : src) ptrs.push_back(&im);
           const Image out = clockmix_pixels(ptrs, recipe);
           for (std::uint8_t v : out.data()) {
             if (std::find(values, values + n, v) == values + n) {
               return result(false, "blended pixel value " + std::to_string(v));
             }
           }
         }
         return result(true, "60 recipes");
       }},
      {"pairwise fold matches clockmix_pair",
       [] {
         RandomStream rng(kVerifySeed + 11);
         for (int t = 0; t < 20; ++t) {
           LabeledImage a{constant_image(24, 24, 5), kRealLabel, {}};
           LabeledImage b{constant_image(24, 24, 250), kFakeLabel, {}};
           MixRecipe recipe = sample_recipe(rng, 2, RecipeSampling{});
           recipe.center = FaceCenter{12, 12};
           const LabeledImage images[2] = {a, b};
           const LabeledImage folded = clockmix_n(images, recipe);
           const LabeledImage pair =
               clockmix_pair(a, b, recipe.sweep_angles[0], recipe.rho_base, recipe.center);
           if (!(folded.pixels == pair.pixels) || folded.label != pair.label) {
             return result(false, "fold and pair differ");
           }
         }
         return result(true, "20 recipes");
       }},
      {"hard label is boolean OR",
       [] {
         for (int n = 1; n <= 4; ++n) {
           for (int bits = 0; bits < (1 << n); ++bits) {
             std::vector<int> labels;
             for (int k = 0; k < n; ++k) labels.push_back((bits >> k) & 1);
             if (mix_label_hard(labels) != (bits != 0 ? 1 : 0)) return result(false);
           }
         }
         return result(true, "30 combinations");
       }},
      {"soft label interpolates linearly",
       [] {
         double worst = 0.0;
         for (int i = 0; i <= 100; ++i) {
           const double lambda = i / 100.0;
           for (int ya = 0; ya <= 1; ++ya) {
             for (int yb = 0; yb <= 1; ++yb) {
               const double want = lambda * ya + (1.0 - lambda) * yb;
               worst = std::max(worst, std::abs(mix_label_soft(ya, yb, lambda) - want));
             }
           }
         }
         return result(worst <= 1e-12, format("max error %.3g", worst));
       }},
  };
}

std::vector<std::pair<std::string, Check>> shuffle_checks() {
  return {
      {"apply then invert restores the image",
       [] {
         RandomStream rng(kVerifySeed + 20);
         Image image(64, 64);
         for (auto& v : image.data()) v = static_cast<std::uint8_t>(rng.below(256));
         for (int t = 0; t < 150; ++t) {
           const int g = 2 << rng.below(3);
           const GridPermutation p = random_permutation(rng, g);
           if (!(apply_permutation(apply_permutation(image, p), invert(p)) == image)) {
             return result(false, "g=" + std::to_string(g));
           }
         }
         return result(true, "150 permutations");
       }},
      {"histogram preserved",
       [] {
         RandomStream rng(kVerifySeed + 21);
         Image image(32, 48);
         for (auto& v : image.data()) v = static_cast<std::uint8_t>(rng.below(256));
         const int gs[] = {2, 4, 8};
         const ShuffleResult s = random_shuffle(rng, image, gs);
         std::vector<int> h1(256), h2(256);
         for (auto v : image.data()) ++h1[v];
         for (auto v : s.image.data()) ++h2[v];
         return result(h1 == h2);
       }},
      {"partition tiles cover the image",
       [] {
         Image image(12, 18);
         for (std::size_t i = 0; i < image.data().size(); ++i) {
           image.data()[i] = static_cast<std::uint8_t>(i % 251);
         }
         const auto tiles = partition(image, 3);
         std::size_t total = 0;
         for (const Image& t : tiles) total += t.data().size();
         return result(tiles.size() == 9 && total == image.data().size());
       }},
  };
}

std::vector<std::pair<std::string, Check>> assignment_checks() {
  return {
      {"hungarian matches brute force",
       [] {
         RandomStream rng(kVerifySeed + 30);
         double worst = 0.0;
         for (std::size_t n = 2; n <= 7; ++n) {
           for (int t = 0; t < 30; ++t) {
             SquareMatrix raw(n);
             for (std::size_t i = 0; i < n; ++i) {
               for (std::size_t j = 0; j < n; ++j) raw(i, j) = rng.uniform();
             }
             const ScoreMatrix m(raw);
             const double h = assignment_score(m.matrix(), hungarian_assign(m));
             const double b = assignment_score(m.matrix(), brute_force_assign(m));
             worst = std::max(worst, b - h);
           }
         }
         return result(worst <= 1e-9, format("max gap %.3g", worst));
       }},
      {"greedy trap resolved",
       [] {
         const SquareMatrix raw{{0.9, 0.8, 0.1}, {0.85, 0.1, 0.2}, {0.1, 0.7, 0.3}};
         const AssignmentMatrix a = hungarian_assign(raw);
         const double score = assignment_score(raw, a);
         return result(a.mapping() == std::vector<int>{1, 0, 2} && std::abs(score - 1.95) < 1e-12,
                       format("score %.6f", score));
       }},
      {"assignment is a permutation",
       [] {
         RandomStream rng(kVerifySeed + 31);
         SquareMatrix raw(16);
         for (std::size_t i = 0; i < 16; ++i) {
           for (std::size_t j = 0; j < 16; ++j) raw(i, j) = rng.uniform();
         }
         std::vector<int> cols = hungarian_assign(ScoreMatrix(raw)).mapping();
         std::sort(cols.begin(), cols.end());
         std::vector<int> want(16);
         std::iota(want.begin(), want.end(), 0);
         return result(cols == want);
       }},
  };
}

Image random_image(RandomStream& rng, int size) {
  Image image(size, size);
  for (auto& v : image.data()) v = static_cast<std::uint8_t>(rng.below(256));
  return image;
}

std::vector<std::pair<std::string, Check>> advscm_checks() {
  return {
      {"analytic gradient matches finite differences",
       [] {
         RandomStream rng(kVerifySeed + 40);
         const Image image = random_image(rng, 16);
         const Image shuffled = apply_permutation(image, random_permutation(rng, 2));
         ReferenceScorer scorer({2}, rng.next(), 0.5);
         const AssignmentMatrix m_hat =
             AssignmentMatrix::from_mapping(random_permutation(rng, 2).mapping());
         const std::vector<double> grad = scorer.grad_log_p(image, shuffled, 2, m_hat);
         std::vector<double> theta(scorer.parameters().begin(), scorer.parameters().end());
         const double h = 1e-5;
         double worst = 0.0;
         for (std::size_t i = 0; i < theta.size(); i += 7) {
           std::vector<double> t = theta;
           t[i] = theta[i] + h;
           scorer.set_parameters(t);
           const double up = log_selection_probability(scorer.score(image, shuffled, 2), m_hat);
           t[i] = theta[i] - h;
           scorer.set_parameters(t);
           const double down = log_selection_probability(scorer.score(image, shuffled, 2), m_hat);
           const double fd = (up - down) / (2 * h);
           const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
           worst = std::max(worst, std::abs(fd - grad[i]) / scale);
         }
         scorer.set_parameters(theta);
         return result(worst < 1e-4, format("max relative error %.3g", worst));
       }},
      {"one update raises log p",
       [] {
         RandomStream rng(kVerifySeed + 41);
         for (int t = 0; t < 20; ++t) {
           const Image image = random_image(rng, 16);
           const Image shuffled = apply_permutation(image, random_permutation(rng, 2));
           ReferenceScorer scorer({2}, rng.next());
           const AssignmentMatrix m_hat = hungarian_assign(scorer.score(image, shuffled, 2));
           const double before = log_selection_probability(scorer.score(image, shuffled, 2), m_hat);
           const GradientSample sample{0.5, scorer.grad_log_p(image, shuffled, 2, m_hat)};
           scorer.set_parameters(reinforce_update(scorer.parameters(), {&sample, 1}, 1e-3));
           const double after = log_selection_probability(scorer.score(image, shuffled, 2), m_hat);
           if (!(after > before)) return result(false, format("log p fell by %.3g", before - after));
         }
         return result(true, "20 trials");
       }},
      {"round leaves parameters untouched",
       [] {
         RandomStream rng(kVerifySeed + 42);
         const Image image = random_image(rng, 16);
         const ReferenceExtractor extractor(ImageGrid{16, 16}, rng.next());
         const ReferenceScorer scorer({2, 4}, rng.next());
         const std::vector<double> before(scorer.parameters().begin(), scorer.parameters().end());
         const int gs[] = {2, 4};
         const AdvRoundOutput out = advscm_round(extractor, scorer, image, rng, gs);
         const bool same = std::equal(before.begin(), before.end(), scorer.parameters().begin());
         return result(same && out.distance >= 0.0 && out.p > 0.0 && out.p <= 1.0);
       }},
  };
}

std::vector<std::pair<std::string, Check>> objectives_checks() {
  return {
      {"anchor values",
       [] {
         const double half = bce_loss({0.5, 1.0});
         const double perfect = bce_loss({1.0, 1.0});
         const double soft = bce_loss({0.7, 0.7});
         const bool ok = std::abs(half - 0.693147) <= 1e-6 && perfect <= 1e-6 &&
                         std::abs(soft - 0.610864) <= 1e-6;
         return result(ok, format("ln2 anchor %.7f", half));
       }},
      {"label flip symmetry",
       [] {
         RandomStream rng(kVerifySeed + 50);
         for (int t = 0; t < 200; ++t) {
           const double y = rng.uniform();
           const double yp = rng.uniform(0.01, 0.99);
           if (std::abs(bce_loss({yp, y}) - bce_loss({1 - yp, 1 - y})) > 1e-12) {
             return result(false);
           }
         }
         return result(true, "200 pairs");
       }},
      {"monotone in prediction",
       [] {
         double prev1 = bce_loss({0.001, 1.0});
         double prev0 = bce_loss({0.001, 0.0});
         for (int i = 2; i < 1000; ++i) {
           const double yp = i / 1000.0;
           const double l1 = bce_loss({yp, 1.0});
           const double l0 = bce_loss({yp, 0.0});
           if (!(l1 < prev1) || !(l0 > prev0)) return result(false, format("at %.3f", yp));
           prev1 = l1;
           prev0 = l0;
         }
         return result(true);
       }},
      {"soft target minimised at y' = y",
       [] {
         for (int k = 1; k < 10; ++k) {
           const double y = k / 10.0;
           int best = 0;
           for (int i = 1; i < 1000; ++i) {
             if (best == 0 || bce_loss({i / 1000.0, y}) < bce_loss({best / 1000.0, y})) best = i;
           }
           if (best != k * 100) return result(false, format("y=%.1f", y));
         }
         return result(true);
       }},
  };
}

struct Suite {
  std::string name;
  std::function<std::vector<std::pair<std::string, Check>>()> checks;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {"geometry", geometry_checks},     {"clockmix", clockmix_checks},
      {"shuffle", shuffle_checks},       {"assignment", assignment_checks},
      {"advscm", advscm_checks},         {"objectives", objectives_checks},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Suite& s : suites()) out.push_back(s.name);
    return out;
  }();
  return names;
}

std::vector<CheckResult> run_verify(const std::string& filter) {
  std::vector<CheckResult> results;
  for (const Suite& suite : suites()) {
    if (!filter.empty() && suite.name.find(filter) == std::string::npos) continue;
    for (auto& [name, check] : suite.checks()) {
      CheckResult r;
      try {
        r = check();
      } catch (const std::exception& e) {
        r = result(false, std::string("threw: ") + e.what());
      }
      r.suite = suite.name;
      r.name = name;
      results.push_back(std::move(r));
    }
  }
  return results;
}

}  // namespace ed4
