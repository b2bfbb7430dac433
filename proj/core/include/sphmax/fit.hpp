#pragma once

#include <span>
#include <utility>
#include <vector>

namespace sphmax {

/// Least-squares power law value ≈ exp(intercept) * delta^slope.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope (0 for an exact fit).
  double stdError = 0.0;
  /// (log 1/delta, log value) pairs used in the fit.
  std::vector<std::pair<double, double>> points;
};

/// OLS of log(value) against log(delta). Throws std::invalid_argument for
/// fewer than three points, non-positive values, or a single distinct delta.
FitResult fit_exponent(std::span<const std::pair<double, double>> deltaValue);

}  // namespace sphmax
