#pragma once

#include <cstddef>
#include <span>

namespace blowup {

/// Quadratic trend test on ln A over a trailing window.
struct BarometerReport {
  /// Sample range [window_begin, window_end) that was analysed.
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  double intercept = 0.0;
  double linear_coeff = 0.0;
  /// beta_2 in ln A = beta_0 + beta_1 t + beta_2 t^2.
  double quadratic_coeff = 0.0;
  double quadratic_stderr = 0.0;
  double z_score = 0.0;
  /// quadratic_coeff > 0 and z_score > threshold.
  bool flagged = false;
};

inline constexpr double kDefaultBarometerZ = 3.0;
inline constexpr std::size_t kMinBarometerWindow = 8;

/// Fits the last `window` samples. Residual scatter is floored at the
/// floating-point resolution of ln A, so exactly log-linear data is never
/// flagged on rounding noise.
///
/// Throws DomainError for non-positive values or window < 8, and
/// InsufficientDataError for fewer than `window` samples or constant t.
[[nodiscard]] BarometerReport barometer(std::span<const double> times,
                                        std::span<const double> values,
                                        std::size_t window,
                                        double z_threshold = kDefaultBarometerZ);

}  // namespace blowup
