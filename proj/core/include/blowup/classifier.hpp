#pragma once

// Decides from F(A) alone whether dA = F(A) dt reaches infinity in finite
// time, i.e. whether the integral of 1/F from A0 to infinity converges.
//
// There is no single comparison function separating convergent from
// divergent tails, so two heuristics vote and disagreement is reported as
// inconclusive:
//
//  * quadrature ladder: integrals over successive decades [10^(j-1), 10^j]*A0
//    must shrink geometrically and faster than the harmonic (A ln A)
//    boundary;
//  * tail exponent: local log-slopes p(A) = ln(F(eA)/F(A)) are fitted as
//    p(A) = p_inf + q/ln(A). p_inf > 1 means a power tail A^p; p_inf = 1
//    leaves a logarithmic factor (ln A)^q whose integral converges for
//    q > 1.

#include <optional>
#include <string>
#include <vector>

#include "blowup/growth_law.hpp"

namespace blowup {

enum class Verdict { kFiniteTime, kInfiniteTime, kInconclusive };

[[nodiscard]] const char* to_string(Verdict verdict) noexcept;

struct QuadratureEvidence {
  Verdict verdict = Verdict::kInconclusive;
  /// Ladder points A0 * 10^j, j = 0..decades.
  std::vector<double> ladder;
  /// Integral of 1/F over each ladder interval.
  std::vector<double> increments;
  /// Sum of increments.
  double partial_integral = 0.0;
  std::string reason;
};

struct TailEvidence {
  Verdict verdict = Verdict::kInconclusive;
  std::vector<double> grid;
  std::vector<double> local_exponents;
  /// p_inf of the fit p(A) = p_inf + q / ln A.
  double limit_exponent = 0.0;
  /// q of the same fit.
  double log_exponent = 0.0;
  std::string reason;
};

struct ConvergenceVerdict {
  Verdict verdict = Verdict::kInconclusive;
  /// Time to reach infinity from A0; set only for kFiniteTime.
  std::optional<double> singularity_time_estimate;
  /// Asymptotic exponent p with F(A) ~ A^p.
  double tail_exponent = 0.0;
  double A0 = 1.0;
  bool monotone = true;
  QuadratureEvidence quadrature;
  TailEvidence tail;
};

struct ClassifierOptions {
  /// Margin s in the power criterion p >= 1 + s.
  double margin = 0.05;
  /// Successive ladder increments must shrink by at least this ratio.
  double ratio_limit = 0.9;
  int ladder_decades = 8;
  /// Number of trailing ladder increments the convergence tests look at.
  int tail_increments = 4;
  std::vector<double> exponent_grid = {1e4, 1e5, 1e6, 1e7, 1e8};
  /// Relative tolerance of each decade integral.
  double quadrature_tol = 1e-12;
};

/// Smallest of 1, e, 10, 100, ... at which F is positive and finite.
[[nodiscard]] double default_lower_limit(const GrowthLaw& law);

/// Throws DomainError (naming the point) when F is non-positive or
/// non-finite at any sample point in [A0, 1e8 A0].
[[nodiscard]] ConvergenceVerdict classify_growth_law(
    const GrowthLaw& law, std::optional<double> A0 = std::nullopt,
    const ClassifierOptions& opts = {});

}  // namespace blowup
