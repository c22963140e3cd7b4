#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ed4/advscm.hpp"
#include "ed4/image.hpp"
#include "ed4/random.hpp"

namespace ed4 {

// Toy-scale adversarial spatial-consistency run on ReferenceScorer and a
// frozen ReferenceExtractor.
struct AdvDemoSettings {
  std::uint64_t seed = 7;
  int rounds = 200;
  int seeds = 1;
  int batch_size = 8;  // K: images per round, one generator update per round
  double epsilon = 20.0;
  Exploration exploration = Exploration::kProportional;
  std::vector<int> granularities{2};
  int image_size = 32;
  int threads = 1;
};

struct AdvDemoRow {
  int seed_index = 0;
  int round = 0;
  double distance = 0.0;         // mean D of the adversarial view over the batch
  double p = 0.0;                // mean selection probability
  double grad_norm = 0.0;        // norm of the generator update
  double random_distance = 0.0;  // mean D of a uniformly random view, same I_s1
};

struct AdvDemoSummary {
  std::vector<double> adversarial_mean;  // per seed, over all rounds
  std::vector<double> random_mean;
  int wins = 0;  // seeds where adversarial_mean > random_mean
};

// Synthetic images made of a few random colour blocks and gradients.
std::vector<Image> make_toy_batch(RandomStream& rng, int count, int size);

// Runs `rounds` rounds for each of `seeds` seeds. `images`, when non-empty,
// replaces the toy batch (all must be image_size square). Rows are reported
// in seed-major order.
AdvDemoSummary run_adv_demo(const AdvDemoSettings& settings, const std::vector<Image>& images,
                            const std::function<void(const AdvDemoRow&)>& on_row);

}  // namespace ed4
