#include "blowup/model.hpp"

#include <limits>
#include <string>

#include "blowup/error.hpp"

namespace blowup {
namespace {

// Times closer than this fraction of t* to the singularity are rejected.
constexpr double kBlowupGuard = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

void require_before_blowup(double t, double t_star, const char* model) {
  if (t >= t_star * (1.0 - kBlowupGuard)) {
    throw DomainError(std::string(model) + ": t = " + std::to_string(t) +
                      " is at or beyond blow-up time t_star = " +
                      std::to_string(t_star));
  }
}

}  // namespace

ScenarioParams ScenarioParams::calibrated(double R, double I) {
  ScenarioParams p;
  p.R = R;
  p.I = I;
  p.k = calibrate_k(R, I);
  return p;
}

BlowUpTime BlowUpTime::finite_at(double t_star) {
  require(t_star > 0.0 && std::isfinite(t_star),
          "blow-up time must be positive and finite");
  BlowUpTime b;
  b.t_star_ = t_star;
  return b;
}

double BlowUpTime::t_star() const {
  if (!t_star_) throw DomainError("no finite-time singularity");
  return *t_star_;
}

double calibrate_k(double R, double I) {
  require(R > 1.0, "calibrate_k: growth factor R must exceed 1");
  require(I > 0.0, "calibrate_k: intelligence ratio I must be positive");
  return std::log(R) / I;
}

double exp_phase_solution(double c, double k, double I, double t1) {
  require(t1 >= 0.0, "exp_phase_solution: t1 must be non-negative");
  require(I > 0.0, "exp_phase_solution: I must be positive");
  return c * std::exp(k * I * t1);
}

double exp_phase_solution(const ScenarioParams& params, double t1) {
  return exp_phase_solution(params.c, params.k, params.I, t1);
}

double phase1_duration(double R, double I) {
  require(R > 1.0, "phase1_duration: growth factor R must exceed 1");
  require(I >= 1.0, "phase1_duration: I < 1 means parity is already reached");
  return std::log(I) / std::log(R);
}

double hyperbolic_solution(double k, double I, double t2) {
  require(k > 0.0 && I > 0.0, "hyperbolic_solution: k and I must be positive");
  require(t2 >= 0.0, "hyperbolic_solution: t2 must be non-negative");
  const double t_star = 1.0 / (k * I);
  require_before_blowup(t2, t_star, "hyperbolic_solution");
  return I / (1.0 - k * I * t2);
}

BlowUpTime hyperbolic_blowup_time(double k, double I) {
  require(k > 0.0 && I > 0.0,
          "hyperbolic_blowup_time: k and I must be positive");
  return BlowUpTime::finite_at(1.0 / (k * I));
}

double total_singularity_time(double R, double I) {
  const double k = calibrate_k(R, I);
  return phase1_duration(R, I) + hyperbolic_blowup_time(k, I).t_star();
}

double powerlaw_solution(double k, double I, double n_exp, double t2) {
  require(n_exp > 1.0,
          "powerlaw_solution: n <= 1 has no finite-time singularity; use the "
          "exponential or logarithmic law");
  require(k > 0.0 && I > 0.0, "powerlaw_solution: k and I must be positive");
  require(t2 >= 0.0, "powerlaw_solution: t2 must be non-negative");
  const double t_star = powerlaw_blowup_time(k, I, n_exp).t_star();
  require_before_blowup(t2, t_star, "powerlaw_solution");
  // I * (1 - t2/t*)^(-1/(n-1)), same cancellation-free form as the n = 2 law.
  const double m = n_exp - 1.0;
  return I * std::pow(1.0 - m * k * std::pow(I, m) * t2, -1.0 / m);
}

BlowUpTime powerlaw_blowup_time(double k, double I, double n_exp) {
  require(k > 0.0 && I > 0.0, "powerlaw_blowup_time: k and I must be positive");
  if (!(n_exp > 1.0)) return BlowUpTime::infinite();
  const double m = n_exp - 1.0;
  return BlowUpTime::finite_at(1.0 / (m * k * std::pow(I, m)));
}

double loglaw_solution(double c, double k, double t) {
  require(std::isfinite(c) && std::isfinite(k) && std::isfinite(t),
          "loglaw_solution: inputs must be finite");
  const double inner = std::exp(c + k * t);
  if (inner > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("loglaw_solution: exp(exp(" + std::to_string(c + k * t) +
                        ")) exceeds the double range (no blow-up)");
  }
  return std::exp(inner);
}

double coupled_gdp_solution(double k1, double t) {
  require(k1 > 0.0, "coupled_gdp_solution: k1 must be positive");
  require(t >= 0.0, "coupled_gdp_solution: t must be non-negative");
  require_before_blowup(t, 1.0 / k1, "coupled_gdp_solution");
  return 1.0 / (1.0 - k1 * t);
}

double coupled_gdp_initial_gdp(double k1, double k2) {
  require(k1 > 0.0 && k2 > 0.0, "coupled system: k1 and k2 must be positive");
  return k1 / k2;
}

}  // namespace blowup
