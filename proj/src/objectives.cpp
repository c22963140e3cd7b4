#include "ed4/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {

double bce_loss(const Prediction& pred) {
  if (std::isnan(pred.y_prime) || std::isnan(pred.y)) {
    throw DomainError("binary cross-entropy got a NaN input");
  }
  if (pred.y < 0.0 || pred.y > 1.0) {
    throw DomainError("target must lie in [0, 1], got " + std::to_string(pred.y));
  }
  const double yp = std::clamp(pred.y_prime, kPredictionClamp, 1.0 - kPredictionClamp);
  const double loss = -(pred.y * std::log(yp) + (1.0 - pred.y) * std::log1p(-yp));
  return std::max(loss, 0.0);
}

double batch_mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("batch_mean of an empty list");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace ed4
