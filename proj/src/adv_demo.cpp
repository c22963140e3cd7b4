#include "ed4/adv_demo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ed4/advscm.hpp"
#include "ed4/error.hpp"
#include "ed4/parallel.hpp"
#include "ed4/shuffle.hpp"

namespace ed4 {

std::vector<Image> make_toy_batch(RandomStream& rng, int count, int size) {
  std::vector<Image> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    Image img(size, size);
    // Vertical colour gradient as background.
    std::uint8_t top[3], bottom[3];
    for (int c = 0; c < 3; ++c) {
      top[c] = static_cast<std::uint8_t>(rng.below(256));
      bottom[c] = static_cast<std::uint8_t>(rng.below(256));
    }
    for (int i = 0; i < size; ++i) {
      const double t = size > 1 ? static_cast<double>(i) / (size - 1) : 0.0;
      for (int j = 0; j < size; ++j) {
        std::uint8_t* px = img.pixel(i, j);
        for (int c = 0; c < 3; ++c) {
          px[c] = static_cast<std::uint8_t>(std::lround((1 - t) * top[c] + t * bottom[c]));
        }
      }
    }
    // A few solid blocks.
    const int blocks = 3 + static_cast<int>(rng.below(3));
    for (int b = 0; b < blocks; ++b) {
      const int h = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size / 2)));
      const int w = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size / 2)));
      const int r0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - h + 1)));
      const int c0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size - w + 1)));
      std::uint8_t color[3];
      for (auto& c : color) c = static_cast<std::uint8_t>(rng.below(256));
      for (int i = r0; i < r0 + h; ++i)
        for (int j = c0; j < c0 + w; ++j) std::copy(color, color + 3, img.pixel(i, j));
    }
    out.push_back(std::move(img));
  }
  return out;
}

AdvDemoSummary run_adv_demo(const AdvDemoSettings& settings, const std::vector<Image>& images,
                            const std::function<void(const AdvDemoRow&)>& on_row) {
  if (settings.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (settings.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (settings.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(settings.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (settings.granularities.empty()) throw ConfigError("granularity set is empty");

  AdvDemoSummary summary;
  const ImageGrid grid{settings.image_size, settings.image_size};
  for (int s = 0; s < settings.seeds; ++s) {
    const std::uint64_t seed = splitmix64(settings.seed + static_cast<std::uint64_t>(s));
    RandomStream setup(seed);
    std::vector<Image> batch = images;
    if (batch.empty()) batch = make_toy_batch(setup, settings.batch_size, settings.image_size);
    for (const auto& img : batch) {
      if (img.height() != grid.height || img.width() != grid.width) {
        throw DataError("adv-demo images must all be " + std::to_string(grid.height) + "x" +
                        std::to_string(grid.width));
      }
    }

    const ReferenceExtractor extractor(grid, setup.next());
    ReferenceScorer scorer(settings.granularities, setup.next());
    AdvScmTrainer trainer(extractor, scorer,
                          AdvScmSettings{settings.epsilon, static_cast<int>(batch.size()),
                                         settings.granularities, settings.exploration});

    double adv_total = 0.0, random_total = 0.0;
    for (int round = 0; round < settings.rounds; ++round) {
      std::vector<double> random_d(batch.size());
      std::vector<std::optional<AdvRoundOutput>> slots(batch.size());
      parallel_for(batch.size(), settings.threads, [&](std::size_t k) {
        RandomStream rng(stable_hash(seed, std::to_string(round) + "/" + std::to_string(k)));
        slots[k] = advscm_round(extractor, scorer, batch[k], rng, settings.granularities,
                                settings.exploration);
        // Baseline: a uniform permutation at the same granularity, paired
        // with the same random view.
        RandomStream baseline(rng.next());
        const GridPermutation perm =
            random_permutation(baseline, slots[k]->random_view.permutation.granularity());
        random_d[k] = feature_distance(extractor.extract(slots[k]->random_view.image),
                                       extractor.extract(apply_permutation(batch[k], perm)));
      });
      AdvDemoRow row;
      row.seed_index = s;
      row.round = round;
      for (std::size_t k = 0; k < batch.size(); ++k) {
        row.distance += slots[k]->distance;
        row.p += slots[k]->p;
        row.random_distance += random_d[k];
        row.grad_norm = trainer.accumulate(*slots[k]);
      }
      const double kb = static_cast<double>(batch.size());
      row.distance /= kb;
      row.p /= kb;
      row.random_distance /= kb;
      adv_total += row.distance;
      random_total += row.random_distance;
      if (on_row) on_row(row);
    }
    const double rounds = std::max(settings.rounds, 1);
    summary.adversarial_mean.push_back(adv_total / rounds);
    summary.random_mean.push_back(random_total / rounds);
    if (settings.rounds > 0 && adv_total > random_total) ++summary.wins;
  }
  return summary;
}

}  // namespace ed4
