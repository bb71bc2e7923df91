#include "blowup/growth_law.hpp"

#include <cmath>
#include <utility>

#include "blowup/error.hpp"

namespace blowup {

GrowthLaw::GrowthLaw(std::string name, Rate rate)
    : name_(std::move(name)), rate_(std::move(rate)) {
  if (!rate_) throw DomainError("GrowthLaw: empty rate function");
}

GrowthLaw GrowthLaw::scaled(double c) const {
  return GrowthLaw(std::to_string(c) + "*(" + name_ + ")",
                   [c, f = rate_](double A) { return c * f(A); });
}

namespace laws {

GrowthLaw exponential(double k, double I) {
  const double rate = k * I;
  return GrowthLaw("k*I*A", [rate](double A) { return rate * A; });
}

GrowthLaw power(double k, double n) {
  if (n == 2.0) return hyperbolic(k);
  return GrowthLaw("k*A^n", [k, n](double A) { return k * std::pow(A, n); });
}

GrowthLaw hyperbolic(double k) {
  return GrowthLaw("k*A^2", [k](double A) { return k * A * A; });
}

GrowthLaw logarithmic(double k) {
  return GrowthLaw("k*ln(A)*A", [k](double A) { return k * std::log(A) * A; });
}

GrowthLaw log_power(double k, double q) {
  return GrowthLaw("k*A*ln(A)^q", [k, q](double A) {
    return k * A * std::pow(std::log(A), q);
  });
}

GrowthLaw shifted_logarithmic(double k) {
  return GrowthLaw("k*A*(1+ln(A))",
                   [k](double A) { return k * A * (1.0 + std::log(A)); });
}

}  // namespace laws
}  // namespace blowup
