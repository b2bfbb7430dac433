#include "sphmax/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace sphmax {

FitResult fit_exponent(std::span<const std::pair<double, double>> deltaValue) {
  if (deltaValue.size() < 3) throw std::invalid_argument("fit_exponent: at least three points required");
  FitResult fit;
  double sx = 0.0, sy = 0.0;
  for (const auto& [delta, value] : deltaValue) {
    if (!(delta > 0.0)) throw std::invalid_argument("fit_exponent: delta must be positive");
    if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument("fit_exponent: non-positive value");
    fit.points.emplace_back(-std::log(delta), std::log(value));
    sx += std::log(delta);
    sy += std::log(value);
  }
  const double k = static_cast<double>(deltaValue.size());
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [negLogDelta, logValue] : fit.points) {
    const double dx = -negLogDelta - mx;
    sxx += dx * dx;
    sxy += dx * (logValue - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_exponent: deltas must differ");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [negLogDelta, logValue] : fit.points) {
    const double r = logValue - (fit.intercept + fit.slope * -negLogDelta);
    rss += r * r;
  }
  fit.stdError = k > 2.0 ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace sphmax
