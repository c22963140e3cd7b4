#include "ed4/advscm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {

double feature_distance(std::span<const double> f1, std::span<const double> f2) {
  if (f1.size() != f2.size()) {
    throw DomainError("feature vectors differ in dimension: " + std::to_string(f1.size()) +
                      " vs " + std::to_string(f2.size()));
  }
  if (f1.empty()) throw DomainError("feature vectors are empty");
  double s = 0.0;
  for (std::size_t k = 0; k < f1.size(); ++k) s += std::abs(f1[k] - f2[k]);
  return s / static_cast<double>(f1.size());
}

double selection_probability(const ScoreMatrix& m, const AssignmentMatrix& m_hat) {
  if (m.size() != m_hat.size()) {
    throw DomainError("score matrix is " + std::to_string(m.size()) +
                      "x" + std::to_string(m.size()) + " but assignment is " +
                      std::to_string(m_hat.size()) + "x" + std::to_string(m_hat.size()));
  }
  return assignment_score(m.matrix(), m_hat) / static_cast<double>(m.size());
}

double log_selection_probability(const ScoreMatrix& m, const AssignmentMatrix& m_hat) {
  return std::log(selection_probability(m, m_hat));
}

std::vector<double> reinforce_update(std::span<const double> theta,
                                     std::span<const GradientSample> samples, double epsilon) {
  if (samples.empty()) throw DomainError("REINFORCE update needs at least one sample");
  if (!(epsilon > 0.0)) throw DomainError("learning rate must be positive");
  std::vector<double> out(theta.begin(), theta.end());
  const double scale = epsilon / static_cast<double>(samples.size());
  for (const auto& s : samples) {
    if (s.grad_log_p.size() != theta.size()) {
      throw DomainError("gradient has " + std::to_string(s.grad_log_p.size()) +
                        " entries, parameters have " + std::to_string(theta.size()));
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * s.reward * s.grad_log_p[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// ReferenceScorer

ReferenceScorer::ReferenceScorer(std::vector<int> granularities, std::uint64_t seed,
                                 double init_scale)
    : granularities_(std::move(granularities)) {
  if (granularities_.empty()) throw DomainError("scorer needs at least one granularity");
  std::sort(granularities_.begin(), granularities_.end());
  granularities_.erase(std::unique(granularities_.begin(), granularities_.end()),
                       granularities_.end());
  std::size_t total = 0;
  for (int g : granularities_) {
    if (g < 1) throw DomainError("granularity must be >= 1");
    offsets_.push_back(total);
    const std::size_t n = static_cast<std::size_t>(g) * g;
    total += n * n * kSummarySize;
  }
  RandomStream rng(seed);
  theta_.resize(total);
  for (double& w : theta_) w = init_scale * rng.normal();
}

void ReferenceScorer::set_parameters(std::vector<double> theta) {
  if (theta.size() != theta_.size()) {
    throw DomainError("scorer expects " + std::to_string(theta_.size()) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  theta_ = std::move(theta);
}

std::size_t ReferenceScorer::block_offset(int granularity) const {
  const auto it = std::find(granularities_.begin(), granularities_.end(), granularity);
  if (it == granularities_.end()) {
    throw DomainError("scorer has no weights for granularity " + std::to_string(granularity));
  }
  return offsets_[static_cast<std::size_t>(it - granularities_.begin())];
}

std::vector<double> ReferenceScorer::summarize(const Image& image, const Image& shuffled) {
  if (!image.same_shape(shuffled)) throw DomainError("scorer inputs differ in size");
  std::vector<double> summary(kSummarySize, 0.0);
  std::vector<double> counts(kPoolSide * kPoolSide, 0.0);
  const Image* inputs[] = {&image, &shuffled};
  for (std::size_t which = 0; which < 2; ++which) {
    const Image& img = *inputs[which];
    std::fill(counts.begin(), counts.end(), 0.0);
    double* cells = summary.data() + which * kPoolSide * kPoolSide;
    for (int i = 0; i < img.height(); ++i) {
      const int ci = i * kPoolSide / img.height();
      for (int j = 0; j < img.width(); ++j) {
        const int cj = j * kPoolSide / img.width();
        const std::uint8_t* px = img.pixel(i, j);
        const std::size_t cell = static_cast<std::size_t>(ci * kPoolSide + cj);
        cells[cell] += (px[0] + px[1] + px[2]) / (3.0 * 255.0) - 0.5;
        counts[cell] += 1.0;
      }
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] > 0.0) cells[c] /= counts[c];
    }
  }
  return summary;
}

std::vector<double> ReferenceScorer::softmax_rows(std::span<const double> summary,
                                                  int granularity) const {
  const std::size_t n = static_cast<std::size_t>(granularity) * granularity;
  const double* w = theta_.data() + block_offset(granularity);
  std::vector<double> probs(n * n);
  for (std::size_t r = 0; r < n * n; ++r) {
    double z = 0.0;
    const double* wr = w + r * kSummarySize;
    for (std::size_t c = 0; c < kSummarySize; ++c) z += wr[c] * summary[c];
    probs[r] = z;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double* row = probs.data() + i * n;
    const double zmax = *std::max_element(row, row + n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - zmax);
      sum += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
  }
  return probs;
}

ScoreMatrix ReferenceScorer::score(const Image& image, const Image& shuffled,
                                   int granularity) const {
  const auto summary = summarize(image, shuffled);
  const std::size_t n = static_cast<std::size_t>(granularity) * granularity;
  return ScoreMatrix(SquareMatrix(n, softmax_rows(summary, granularity)));
}

std::vector<double> ReferenceScorer::grad_log_p(const Image& image, const Image& shuffled,
                                                int granularity,
                                                const AssignmentMatrix& m_hat) const {
  const std::size_t n = static_cast<std::size_t>(granularity) * granularity;
  if (m_hat.size() != n) throw DomainError("assignment size does not match granularity");
  const auto summary = summarize(image, shuffled);
  const auto probs = softmax_rows(summary, granularity);
  const ScoreMatrix m(SquareMatrix(n, probs));
  const double p = selection_probability(m, m_hat);

  // log p = log((1/N) sum_i m(i, s_i)); d m(i, s) / d z(i, k) = m(i, s)(delta_sk - m(i, k)).
  // Entries held at the floor by ScoreMatrix have zero derivative.
  std::vector<double> dz(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(m_hat.column_of(i));
    const double mis = probs[i * n + s];
    if (mis < ScoreMatrix::kDefaultFloor) continue;
    const double coeff = mis / (static_cast<double>(n) * p);
    for (std::size_t k = 0; k < n; ++k) {
      dz[i * n + k] = coeff * ((k == s ? 1.0 : 0.0) - probs[i * n + k]);
    }
  }

  std::vector<double> grad(theta_.size(), 0.0);
  double* g = grad.data() + block_offset(granularity);
  for (std::size_t r = 0; r < n * n; ++r) {
    if (dz[r] == 0.0) continue;
    double* gr = g + r * kSummarySize;
    for (std::size_t c = 0; c < kSummarySize; ++c) gr[c] = dz[r] * summary[c];
  }
  return grad;
}

// ---------------------------------------------------------------------------
// ReferenceExtractor

ReferenceExtractor::ReferenceExtractor(ImageGrid grid, std::uint64_t seed) : grid_(grid) {
  validate_grid(grid);
  const std::size_t inputs =
      static_cast<std::size_t>(grid.height) * grid.width * Image::kChannels;
  const double scale = 1.0 / std::sqrt(static_cast<double>(inputs));
  RandomStream rng(seed);
  weights_.resize(kDimension * inputs);
  for (float& w : weights_) w = static_cast<float>(scale * rng.normal());
}

FeatureVector ReferenceExtractor::extract(const Image& image) const {
  if (image.height() != grid_.height || image.width() != grid_.width) {
    throw DomainError("extractor was built for " + std::to_string(grid_.height) + "x" +
                      std::to_string(grid_.width) + " images, got " +
                      std::to_string(image.height()) + "x" + std::to_string(image.width()));
  }
  const auto px = image.data();
  std::vector<double> centred(px.size());
  for (std::size_t k = 0; k < px.size(); ++k) centred[k] = (px[k] - 127.5) / 127.5;
  FeatureVector out(kDimension);
  for (std::size_t d = 0; d < kDimension; ++d) {
    const float* w = weights_.data() + d * centred.size();
    double z = 0.0;
    for (std::size_t k = 0; k < centred.size(); ++k) z += w[k] * centred[k];
    out[d] = std::tanh(z);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounds and the generator update

AssignmentMatrix sample_assignment(const ScoreMatrix& m, RandomStream& rng) {
  const std::size_t n = m.size();
  const auto pivot_row = static_cast<std::size_t>(rng.below(n));
  const double u = rng.uniform();
  std::size_t pivot_col = n - 1;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumulative += m(pivot_row, j);
    if (u < cumulative) {
      pivot_col = j;
      break;
    }
  }
  // Rows sum to 1 only within n * floor; u beyond the total lands on the
  // last column, which is a negligible bias.
  std::vector<int> rest;
  rest.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != pivot_col) rest.push_back(static_cast<int>(j));
  }
  for (std::size_t k = rest.size(); k > 1; --k) {
    std::swap(rest[k - 1], rest[static_cast<std::size_t>(rng.below(k))]);
  }
  std::vector<int> mapping(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mapping[i] = i == pivot_row ? static_cast<int>(pivot_col) : rest[next++];
  }
  return AssignmentMatrix::from_mapping(std::move(mapping));
}

AdvRoundOutput advscm_round(const FeatureExtractor& extractor, const ScorerModel& scorer,
                            const Image& image, RandomStream& rng,
                            std::span<const int> granularities, Exploration exploration) {
  ShuffleResult random_view = random_shuffle(rng, image, granularities);
  const int g = random_view.permutation.granularity();
  ScoreMatrix m = scorer.score(image, random_view.image, g);
  const std::size_t n = static_cast<std::size_t>(g) * g;
  if (m.size() != n) {
    throw DomainError("scorer returned a " + std::to_string(m.size()) + "x" +
                      std::to_string(m.size()) + " matrix for granularity " + std::to_string(g));
  }
  AssignmentMatrix m_hat = hungarian_assign(m);
  GridPermutation adversarial = permutation_from_matrix(m_hat);
  Image adversarial_view = apply_permutation(image, adversarial);

  const FeatureVector f1 = extractor.extract(random_view.image);
  const FeatureVector f2 = extractor.extract(adversarial_view);
  const double distance = feature_distance(f1, f2);
  const double p = selection_probability(m, m_hat);

  AssignmentMatrix sampled = m_hat;
  double sampled_distance = distance;
  if (exploration == Exploration::kProportional) {
    sampled = sample_assignment(m, rng);
    if (sampled != m_hat) {
      const Image view = apply_permutation(image, permutation_from_matrix(sampled));
      sampled_distance = feature_distance(f1, extractor.extract(view));
    }
  }

  std::vector<double> grad = scorer.grad_log_p(image, random_view.image, g, sampled);
  if (grad.size() != scorer.parameters().size()) {
    throw DomainError("scorer gradient length does not match its parameters");
  }
  for (double x : grad) {
    if (!std::isfinite(x)) throw DomainError("scorer produced a non-finite gradient");
  }
  return AdvRoundOutput{std::move(random_view), std::move(m),
                        std::move(m_hat),       std::move(adversarial),
                        std::move(adversarial_view), distance,
                        p,                      std::log(p),
                        std::move(sampled),     sampled_distance,
                        std::move(grad)};
}

AdvScmTrainer::AdvScmTrainer(const FeatureExtractor& extractor, ScorerModel& scorer,
                             AdvScmSettings settings)
    : extractor_(extractor), scorer_(scorer), settings_(std::move(settings)) {
  if (settings_.batch_size < 1) throw DomainError("batch size must be >= 1");
  if (!(settings_.epsilon > 0.0)) throw DomainError("learning rate must be positive");
  if (settings_.granularities.empty()) throw DomainError("granularity set is empty");
}

double AdvScmTrainer::accumulate(const AdvRoundOutput& round) {
  pending_.push_back(GradientSample{round.update_distance, round.grad_log_p});
  if (pending_.size() < static_cast<std::size_t>(settings_.batch_size)) return 0.0;
  return flush();
}

double AdvScmTrainer::flush() {
  if (pending_.empty()) return 0.0;
  const auto theta = scorer_.parameters();
  std::vector<double> updated = reinforce_update(theta, pending_, settings_.epsilon);
  double norm2 = 0.0;
  for (std::size_t k = 0; k < updated.size(); ++k) {
    const double d = updated[k] - theta[k];
    norm2 += d * d;
  }
  scorer_.set_parameters(std::move(updated));
  pending_.clear();
  return std::sqrt(norm2);
}

AdvScmTrainer::StepResult AdvScmTrainer::step(const Image& image, RandomStream& rng) {
  AdvRoundOutput round =
      advscm_round(extractor_, scorer_, image, rng, settings_.granularities, settings_.exploration);
  const std::size_t before = pending_.size();
  const double norm = accumulate(round);
  const bool updated = pending_.size() < before + 1;
  AdvStepReport report{round.distance, round.p, round.log_p, norm};
  const double d = round.distance;
  return StepResult{report, d, updated, std::move(round)};
}

}  // namespace ed4
