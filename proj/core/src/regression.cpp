#include "blowup/regression.hpp"

#include <cmath>
#include <limits>

#include "blowup/error.hpp"

namespace blowup {

void OnlineRegression::add(double x, double y) noexcept {
  ++n_;
  const double dx = x - mean_x_;
  mean_x_ += dx / static_cast<double>(n_);
  mean_y_ += (y - mean_y_) / static_cast<double>(n_);
  sxx_ += dx * (x - mean_x_);
  sxy_ += dx * (y - mean_y_);
}

double OnlineRegression::slope() const noexcept {
  if (n_ < 2 || !(sxx_ > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return sxy_ / sxx_;
}

double OnlineRegression::intercept() const noexcept {
  return mean_y_ - slope() * mean_x_;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InsufficientDataError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = lo + 1 < sorted.size() ? lo + 1 : lo;
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace blowup
