#pragma once

#include <cstddef>
#include <span>

namespace blowup {

/// Streaming least-squares fit of y = a + b x (Welford-style updates).
class OnlineRegression {
 public:
  void add(double x, double y) noexcept;

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  /// Slope b; NaN with fewer than two distinct x values.
  [[nodiscard]] double slope() const noexcept;
  [[nodiscard]] double intercept() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double sxx_ = 0.0;
  double sxy_ = 0.0;
};

/// Linear-interpolation quantile (type 7) of an ascending sample.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace blowup
