#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ed4/assignment.hpp"
#include "ed4/geometry.hpp"
#include "ed4/image.hpp"
#include "ed4/random.hpp"
#include "ed4/shuffle.hpp"

namespace ed4 {

using FeatureVector = std::vector<double>;

// Backbone extractor E(.; theta_e). Implementations must be deterministic and
// safe to call concurrently.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual FeatureVector extract(const Image& image) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Adversarial generator G_a(.; theta_a). score() must return a valid
// ScoreMatrix of size g*g; grad_log_p() is d log p / d theta_a with the
// assignment held fixed, same length as parameters().
class ScorerModel {
 public:
  virtual ~ScorerModel() = default;
  virtual ScoreMatrix score(const Image& image, const Image& shuffled, int granularity) const = 0;
  virtual std::vector<double> grad_log_p(const Image& image, const Image& shuffled,
                                         int granularity, const AssignmentMatrix& m_hat) const = 0;
  virtual std::span<const double> parameters() const = 0;
  virtual void set_parameters(std::vector<double> theta) = 0;
};

// Mean absolute difference over components.
double feature_distance(std::span<const double> f1, std::span<const double> f2);

// p = (1/N) sum_{i,j} m(i,j) * m_hat(i,j)
double selection_probability(const ScoreMatrix& m, const AssignmentMatrix& m_hat);

struct GradientSample {
  double reward = 0.0;  // D for the sample
  std::vector<double> grad_log_p;
};

// theta + (epsilon / K) * sum_k D_k * grad_k
std::vector<double> reinforce_update(std::span<const double> theta,
                                     std::span<const GradientSample> samples, double epsilon);

// Linear-softmax stand-in for the convolutional generator. The input summary
// is the 8x8 mean-pooled grayscale of both images, centred to [-0.5, 0.5]
// (128 values); one
// weight block per supported granularity maps it to N*N logits, and each group
// of N logits goes through a softmax to give one row of m.
class ReferenceScorer final : public ScorerModel {
 public:
  static constexpr int kPoolSide = 8;
  static constexpr std::size_t kSummarySize = 2 * kPoolSide * kPoolSide;

  ReferenceScorer(std::vector<int> granularities, std::uint64_t seed, double init_scale = 0.1);

  ScoreMatrix score(const Image& image, const Image& shuffled, int granularity) const override;
  std::vector<double> grad_log_p(const Image& image, const Image& shuffled, int granularity,
                                 const AssignmentMatrix& m_hat) const override;
  std::span<const double> parameters() const override { return theta_; }
  void set_parameters(std::vector<double> theta) override;

  const std::vector<int>& granularities() const noexcept { return granularities_; }

  static std::vector<double> summarize(const Image& image, const Image& shuffled);

 private:
  std::size_t block_offset(int granularity) const;
  // Row-wise softmax of the block's logits; unclamped.
  std::vector<double> softmax_rows(std::span<const double> summary, int granularity) const;

  std::vector<int> granularities_;
  std::vector<std::size_t> offsets_;
  std::vector<double> theta_;
};

// Fixed random projection of the flattened, centred image to 32 values
// followed by tanh. Weights are drawn once for a given image size.
class ReferenceExtractor final : public FeatureExtractor {
 public:
  static constexpr std::size_t kDimension = 32;

  ReferenceExtractor(ImageGrid grid, std::uint64_t seed);

  FeatureVector extract(const Image& image) const override;
  std::size_t dimension() const override { return kDimension; }

 private:
  ImageGrid grid_;
  std::vector<float> weights_;  // kDimension rows of H*W*3
};

double log_selection_probability(const ScoreMatrix& m, const AssignmentMatrix& m_hat);

struct AdvStepReport {
  double distance = 0.0;   // D
  double p = 0.0;
  double log_p = 0.0;
  double grad_norm = 0.0;  // norm of the applied parameter update, 0 if none
};

// How the generator picks the permutation it is rewarded for.
enum class Exploration {
  // The Hungarian m_hat itself (deterministic).
  kNone,
  // A separate draw with probability p(sigma) / (N-1)!; see sample_assignment.
  kProportional,
};

// Draws a permutation with probability p(sigma) / (N-1)!, where p is the
// selection probability under m: a uniformly chosen row takes its column from
// its row of m and the remaining rows get a uniform permutation of the
// remaining columns. Since each row of m sums to 1, p summed over all N!
// permutations is (N-1)!, so this is exactly the distribution p describes and
// D * grad log p is an unbiased score-function estimate under it. The
// Hungarian m_hat is its mode.
AssignmentMatrix sample_assignment(const ScoreMatrix& m, RandomStream& rng);

// Everything one spatial-consistency round produces for a single image.
struct AdvRoundOutput {
  ShuffleResult random_view;           // I_s1 and its permutation
  ScoreMatrix scores;                  // m
  AssignmentMatrix assignment;         // m_hat = hungarian_assign(m)
  GridPermutation adversarial_permutation;
  Image adversarial_view;              // I_s2
  double distance = 0.0;               // D = L1(F_s1, F_s2)
  double p = 0.0;                      // selection probability of m_hat
  double log_p = 0.0;
  // Generator sample: equal to (assignment, distance) without exploration.
  AssignmentMatrix update_assignment;
  double update_distance = 0.0;
  std::vector<double> grad_log_p;      // d log p(update_assignment) / d theta_a
};

// Steps 1-6 of a round plus the score-function gradient: random shuffle,
// scoring, Hungarian assignment, adversarial shuffle, feature extraction and
// distance. Reads the scorer and extractor only; safe to run concurrently.
AdvRoundOutput advscm_round(const FeatureExtractor& extractor, const ScorerModel& scorer,
                            const Image& image, RandomStream& rng,
                            std::span<const int> granularities,
                            Exploration exploration = Exploration::kNone);

struct AdvScmSettings {
  double epsilon = 0.0002;
  int batch_size = 32;  // K
  std::vector<int> granularities{2, 4, 8};
  Exploration exploration = Exploration::kNone;
};

// Owns the generator side of the alternation: accumulates (D, grad log p) and
// applies the REINFORCE update once every K samples. The extractor is held
// const; its own step on D belongs to the caller's trainer.
class AdvScmTrainer {
 public:
  AdvScmTrainer(const FeatureExtractor& extractor, ScorerModel& scorer, AdvScmSettings settings);

  struct StepResult {
    AdvStepReport report;
    double consistency_loss = 0.0;  // D, to be minimised over theta_e
    bool updated = false;
    AdvRoundOutput round;
  };

  StepResult step(const Image& image, RandomStream& rng);

  // Single-writer reduction for rounds computed elsewhere (possibly in
  // parallel). Returns the update norm if a batch boundary was reached.
  double accumulate(const AdvRoundOutput& round);

  // Applies whatever is pending as a short batch. Returns the update norm.
  double flush();

  std::size_t pending() const noexcept { return pending_.size(); }
  const AdvScmSettings& settings() const noexcept { return settings_; }

 private:
  const FeatureExtractor& extractor_;
  ScorerModel& scorer_;
  AdvScmSettings settings_;
  std::vector<GradientSample> pending_;
};

}  // namespace ed4
