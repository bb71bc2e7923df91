#include "blowup/classifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {
namespace {

constexpr double kLadderCap = 1e300;
constexpr double kSamplesPerDecade = 10.0;
// Relative slack when comparing two quadrature results for "not smaller".
constexpr double kEqualSlack = 1e-9;
// Rounding allowance on fitted exponents.
constexpr double kFitSlack = 1e-6;

std::string point_text(double A) {
  std::ostringstream os;
  os.precision(17);
  os << A;
  return os.str();
}

double checked_rate(const GrowthLaw& law, double A) {
  const double f = law(A);
  if (!std::isfinite(f)) {
    throw DomainError("classify_growth_law: F(" + point_text(A) +
                      ") is not finite");
  }
  if (!(f > 0.0)) {
    throw DomainError("classify_growth_law: F(" + point_text(A) + ") = " +
                      point_text(f) + " is not positive");
  }
  return f;
}

// Integral of 1/F over [a, b] with A = e^u.
double decade_integral(const GrowthLaw& law, double a, double b, double tol) {
  auto integrand = [&](double u) {
    const double A = std::exp(u);
    const double f = law(A);
    return std::isinf(f) ? 0.0 : A / f;
  };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, std::log(a), std::log(b), 15, tol, &error);
}

bool not_smaller(double next, double prev) {
  return next >= prev * (1.0 - kEqualSlack);
}

QuadratureEvidence ladder_test(const GrowthLaw& law, double A0,
                               const ClassifierOptions& opts) {
  QuadratureEvidence ev;
  ev.ladder.push_back(A0);
  for (int j = 1; j <= opts.ladder_decades; ++j) {
    const double lo = ev.ladder.back();
    const double hi = lo * 10.0;
    ev.increments.push_back(decade_integral(law, lo, hi, opts.quadrature_tol));
    ev.partial_integral += ev.increments.back();
    ev.ladder.push_back(hi);
  }

  const auto m = static_cast<std::size_t>(
      std::clamp(opts.tail_increments, 2, opts.ladder_decades));
  const std::size_t first = ev.increments.size() - m;
  const auto& d = ev.increments;

  bool shrinking = true;
  bool geometric = true;
  for (std::size_t j = first + 1; j < d.size(); ++j) {
    if (not_smaller(d[j], d[j - 1])) shrinking = false;
    if (!(d[j] < opts.ratio_limit * d[j - 1])) geometric = false;
  }
  if (!shrinking) {
    ev.verdict = Verdict::kInfiniteTime;
    ev.reason = "decade increments do not decrease";
    return ev;
  }

  // d_j ln(L_{j-1}) stays level or grows for tails no thinner than the
  // harmonic boundary 1/(A ln A).
  std::vector<double> w;
  for (std::size_t j = first; j < d.size(); ++j) {
    w.push_back(d[j] * std::log(ev.ladder[j]));
  }
  bool w_falls = true;
  bool w_rises = true;
  for (std::size_t j = 1; j < w.size(); ++j) {
    if (!(w[j] < w[j - 1])) w_falls = false;
    if (!not_smaller(w[j], w[j - 1])) w_rises = false;
  }
  if (geometric && w_falls) {
    ev.verdict = Verdict::kFiniteTime;
    ev.reason = "decade increments decay geometrically and faster than harmonic";
  } else if (w_rises) {
    ev.verdict = Verdict::kInfiniteTime;
    ev.reason = "decade increments decay no faster than harmonic";
  } else {
    ev.reason = "decade increments decay irregularly";
  }
  return ev;
}

TailEvidence exponent_test(const GrowthLaw& law, double A0,
                           const ClassifierOptions& opts) {
  TailEvidence ev;
  const double base = opts.exponent_grid.empty() ? 1.0 : opts.exponent_grid[0];
  const double shift = A0 > base ? A0 / base : 1.0;
  for (double A : opts.exponent_grid) {
    const double x = A * shift;
    ev.grid.push_back(x);
    ev.local_exponents.push_back(
        std::log(checked_rate(law, std::exp(1.0) * x) / checked_rate(law, x)));
  }
  const std::size_t n = ev.grid.size();
  if (n < 3) {
    ev.reason = "exponent grid needs at least 3 points";
    return ev;
  }

  // p(A) = p_inf + q ln(1 + 1/ln A), exact for A^p ln(A)^q.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log1p(1.0 / std::log(ev.grid[i]));
    const double y = ev.local_exponents[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  const double det = nn * sxx - sx * sx;
  ev.log_exponent = (nn * sxy - sx * sy) / det;
  ev.limit_exponent = (sy - ev.log_exponent * sx) / nn;

  const double s = opts.margin;
  const double hi =
      *std::max_element(ev.local_exponents.begin(), ev.local_exponents.end());
  if (hi <= 1.0 + kFitSlack) {
    ev.verdict = Verdict::kInfiniteTime;
    ev.reason = "local exponent stays at or below 1";
  } else if (ev.limit_exponent >= 1.0 + s) {
    ev.verdict = Verdict::kFiniteTime;
    ev.reason = "limiting exponent above 1 + margin";
  } else if (ev.limit_exponent <= 1.0 - s) {
    ev.verdict = Verdict::kInfiniteTime;
    ev.reason = "limiting exponent below 1";
  } else if (ev.log_exponent >= 1.0 + s) {
    ev.verdict = Verdict::kFiniteTime;
    ev.reason = "linear tail with logarithmic power above 1";
  } else if (ev.log_exponent <= 1.0 + kFitSlack) {
    ev.verdict = Verdict::kInfiniteTime;
    ev.reason = "linear tail with logarithmic power at most 1";
  } else {
    ev.reason = "exponent within margin of the boundary";
  }
  return ev;
}

// Integral of 1/F from A0 to infinity: extends the ladder while F stays
// representable, then closes the remainder as a geometric series.
double singularity_time(const GrowthLaw& law, const QuadratureEvidence& ev,
                        const ClassifierOptions& opts) {
  double total = ev.partial_integral;
  double prev = ev.increments[ev.increments.size() - 2];
  double last = ev.increments.back();
  double L = ev.ladder.back();
  while (L * 10.0 <= kLadderCap && std::isfinite(law(std::exp(1.0) * L * 10.0)) &&
         last > std::numeric_limits<double>::epsilon() * total) {
    const double d = decade_integral(law, L, L * 10.0, opts.quadrature_tol);
    total += d;
    prev = last;
    last = d;
    L *= 10.0;
  }
  const double r = last / prev;
  if (r > 0.0 && r < 1.0) total += last * r / (1.0 - r);
  return total;
}

}  // namespace

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::kFiniteTime:
      return "finite-time";
    case Verdict::kInfiniteTime:
      return "infinite-time";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double default_lower_limit(const GrowthLaw& law) {
  auto usable = [&](double A) {
    const double f = law(A);
    return std::isfinite(f) && f > 0.0;
  };
  if (usable(1.0)) return 1.0;
  if (usable(std::exp(1.0))) return std::exp(1.0);
  for (double A = 10.0; A <= 1e8; A *= 10.0) {
    if (usable(A)) return A;
  }
  throw DomainError("classify_growth_law: F is not positive at any of "
                    "1, e, 10, ..., 1e8");
}

ConvergenceVerdict classify_growth_law(const GrowthLaw& law,
                                       std::optional<double> A0,
                                       const ClassifierOptions& opts) {
  if (opts.ladder_decades < 2) {
    throw DomainError("classify_growth_law: ladder needs at least 2 decades");
  }
  ConvergenceVerdict out;
  out.A0 = A0 ? *A0 : default_lower_limit(law);
  if (!(out.A0 > 0.0) || !std::isfinite(out.A0)) {
    throw DomainError("classify_growth_law: lower limit must be positive");
  }

  // Positivity and monotonicity by sampling the ladder range.
  const double top = out.A0 * std::pow(10.0, opts.ladder_decades);
  const double step = std::pow(10.0, 1.0 / kSamplesPerDecade);
  double prev = checked_rate(law, out.A0);
  for (double A = out.A0 * step; A <= top * (1.0 + 1e-12); A *= step) {
    const double f = checked_rate(law, A);
    if (f < prev) out.monotone = false;
    prev = f;
  }

  out.quadrature = ladder_test(law, out.A0, opts);
  out.tail = exponent_test(law, out.A0, opts);
  out.tail_exponent = out.tail.limit_exponent;

  if (out.monotone && out.quadrature.verdict == out.tail.verdict) {
    out.verdict = out.quadrature.verdict;
  }
  if (out.verdict == Verdict::kFiniteTime) {
    out.singularity_time_estimate = singularity_time(law, out.quadrature, opts);
  }
  return out;
}

}  // namespace blowup
