#pragma once

// Closed-form growth laws and blow-up times for the two-phase AI growth
// model. Every numerical module in the library is checked against these.
//
// Clock conventions:
//   t1 runs from A = 1 (start of the exponential phase),
//   t2 runs from A = I (start of the self-improvement phase),
//   total time to singularity is t1(I) + t2*.

#include <cmath>
#include <optional>

namespace blowup {

/// Annual growth factor of machine intelligence used as the default (R).
inline constexpr double kDefaultGrowthFactor = 1.5872;
/// Default engineer-to-AI intelligence ratio (I).
inline constexpr double kDefaultIntelligenceRatio = 100.0;

/// Named model parameters. Rates are per year (or per period; the two are
/// interchangeable throughout), ratios are dimensionless.
struct ScenarioParams {
  double k = 0.0;                             // growth coefficient
  double I = kDefaultIntelligenceRatio;       // engineer / AI intelligence
  double R = kDefaultGrowthFactor;            // annual growth factor
  double n_exp = 2.0;                         // coupling exponent
  double sigma = 0.0;                         // volatility
  double c = 1.0;                             // integration constant
  double k1 = 0.0;                            // coupled GDP coefficient
  double k2 = 0.0;                            // coupled AI coefficient
  double A0 = 1.0;                            // initial AI level
  double Y0 = 1.0;                            // initial GDP level

  /// Log growth rate r = ln R.
  [[nodiscard]] double r() const { return std::log(R); }

  /// Parameters with k calibrated so that the exponential phase grows by R
  /// per year: k = ln R / I.
  static ScenarioParams calibrated(double R, double I);
};

/// Time of a finite-time singularity measured from the phase start. An
/// empty value means the law has no finite-time singularity.
class BlowUpTime {
 public:
  BlowUpTime() = default;
  static BlowUpTime finite_at(double t_star);
  static BlowUpTime infinite() { return {}; }

  [[nodiscard]] bool finite() const noexcept { return t_star_.has_value(); }
  /// Throws DomainError when not finite.
  [[nodiscard]] double t_star() const;
  [[nodiscard]] const std::optional<double>& value() const noexcept {
    return t_star_;
  }

  friend bool operator==(const BlowUpTime&, const BlowUpTime&) = default;

 private:
  std::optional<double> t_star_;
};

/// k = ln R / I.
[[nodiscard]] double calibrate_k(double R, double I);

/// A = c * exp(k I t1).
[[nodiscard]] double exp_phase_solution(double c, double k, double I,
                                        double t1);
[[nodiscard]] double exp_phase_solution(const ScenarioParams& params,
                                        double t1);

/// Years for A to grow from 1 to I at factor R per year: ln I / ln R.
[[nodiscard]] double phase1_duration(double R, double I);

/// Solution of dA = k A^2 dt with A(0) = I, written as I / (1 - k I t2).
[[nodiscard]] double hyperbolic_solution(double k, double I, double t2);

/// t* = 1 / (k I).
[[nodiscard]] BlowUpTime hyperbolic_blowup_time(double k, double I);

/// Exponential phase plus hyperbolic phase with k = ln R / I:
/// ln I / ln R + 1 / ln R.
[[nodiscard]] double total_singularity_time(double R, double I);

/// Solution of dA = k A^n dt with A(0) = I, n > 1.
[[nodiscard]] double powerlaw_solution(double k, double I, double n_exp,
                                       double t2);

/// t* = 1 / ((n - 1) k I^(n-1)); not finite for n <= 1.
[[nodiscard]] BlowUpTime powerlaw_blowup_time(double k, double I,
                                              double n_exp);

/// Double-exponential solution of dA = k ln(A) A dt: exp(exp(c + k t)).
/// Throws OverflowError when the level leaves the double range.
[[nodiscard]] double loglaw_solution(double c, double k, double t);

/// AI level of the coupled system dY = k1 Y A dt, dA = k2 Y A dt with
/// A(0) = 1 and Y(0) = k1 / k2: A = 1 / (1 - k1 t).
[[nodiscard]] double coupled_gdp_solution(double k1, double t);

/// Y(0) under which coupled_gdp_solution is exact.
[[nodiscard]] double coupled_gdp_initial_gdp(double k1, double k2);

}  // namespace blowup
