#pragma once

#include <functional>
#include <string>

namespace blowup {

/// Autonomous scalar growth law dA = F(A) dt.
///
/// The rate callable must be pure: it is shared between concurrent
/// integrations and evaluated from several threads.
class GrowthLaw {
 public:
  using Rate = std::function<double(double)>;

  GrowthLaw(std::string name, Rate rate);

  [[nodiscard]] double operator()(double A) const { return rate_(A); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const Rate& rate() const noexcept { return rate_; }

  /// c * F(A).
  [[nodiscard]] GrowthLaw scaled(double c) const;

 private:
  std::string name_;
  Rate rate_;
};

namespace laws {

/// k I A: the exponential phase with a human engineer.
GrowthLaw exponential(double k, double I);
/// k A^n (n = 2 is the hyperbolic self-improvement law).
GrowthLaw power(double k, double n);
/// k A^2.
GrowthLaw hyperbolic(double k);
/// k ln(A) A: double-exponential growth without singularity.
GrowthLaw logarithmic(double k);
/// k A ln(A)^q.
GrowthLaw log_power(double k, double q);
/// k A (1 + ln A).
GrowthLaw shifted_logarithmic(double k);

}  // namespace laws
}  // namespace blowup
