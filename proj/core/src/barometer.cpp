#include "blowup/barometer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blowup/error.hpp"

namespace blowup {

BarometerReport barometer(std::span<const double> times,
                          std::span<const double> values, std::size_t window,
                          double z_threshold) {
  if (times.size() != values.size()) {
    throw DomainError("barometer: times and values differ in length");
  }
  if (window < kMinBarometerWindow) {
    throw DomainError("barometer: window must be at least " +
                      std::to_string(kMinBarometerWindow));
  }
  if (values.size() < window) {
    throw InsufficientDataError("barometer: " + std::to_string(values.size()) +
                                " samples, window needs " +
                                std::to_string(window));
  }
  const std::size_t begin = values.size() - window;
  const auto n = static_cast<Eigen::Index>(window);

  Eigen::VectorXd t(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = values[begin + static_cast<std::size_t>(i)];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("barometer: value at sample " +
                        std::to_string(begin + static_cast<std::size_t>(i)) +
                        " is not positive");
    }
    t(i) = times[begin + static_cast<std::size_t>(i)];
    y(i) = std::log(v);
  }

  // Centre and scale t so the design matrix is well conditioned.
  const double t_mean = t.mean();
  const double t_scale = (t.array() - t_mean).abs().maxCoeff();
  if (!(t_scale > 0.0)) {
    throw InsufficientDataError("barometer: all sample times are equal");
  }
  const Eigen::ArrayXd u = (t.array() - t_mean) / t_scale;
  Eigen::MatrixXd X(n, 3);
  X.col(0).setOnes();
  X.col(1) = u.matrix();
  X.col(2) = (u * u).matrix();

  const Eigen::Vector3d coef = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - X * coef;
  const double dof = static_cast<double>(n - 3);
  double s2 = resid.squaredNorm() / dof;
  const double resolution = 64.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, y.cwiseAbs().maxCoeff());
  s2 = std::max(s2, resolution * resolution);
  const Eigen::Matrix3d cov = s2 * (X.transpose() * X).inverse();

  // Back to the original time axis: u = (t - m)/s.
  const double b0 = coef(0), b1 = coef(1), b2 = coef(2);
  BarometerReport report;
  report.window_begin = begin;
  report.window_end = values.size();
  report.quadratic_coeff = b2 / (t_scale * t_scale);
  report.linear_coeff = b1 / t_scale - 2.0 * b2 * t_mean / (t_scale * t_scale);
  report.intercept =
      b0 - b1 * t_mean / t_scale + b2 * t_mean * t_mean / (t_scale * t_scale);
  report.quadratic_stderr = std::sqrt(cov(2, 2)) / (t_scale * t_scale);
  report.z_score = b2 / std::sqrt(cov(2, 2));
  report.flagged = report.quadratic_coeff > 0.0 && report.z_score > z_threshold;
  return report;
}

}  // namespace blowup
