#pragma once

#include <span>

namespace ed4 {

inline constexpr double kPredictionClamp = 1e-7;

struct Prediction {
  double y_prime = 0.5;  // detector output, clamped to [1e-7, 1 - 1e-7]
  double y = 0.0;        // target: hard {0, 1} or soft in [0, 1]
};

// -[y log y' + (1 - y) log(1 - y')] after clamping y'.
double bce_loss(const Prediction& pred);

double batch_mean(std::span<const double> values);

}  // namespace ed4
