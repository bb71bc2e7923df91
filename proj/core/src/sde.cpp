#include "blowup/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double central_difference(const std::function<double(double)>& f, double x,
                          double relative_step) {
  const double h = relative_step * (x != 0.0 ? std::abs(x) : 1.0);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

const char* to_string(ModelLabel label) noexcept {
  switch (label) {
    case ModelLabel::kGbm:
      return "gbm";
    case ModelLabel::kHyperbolicSde:
      return "hyperbolic-sde";
    case ModelLabel::kCustom:
      return "custom";
  }
  return "unknown";
}

const char* to_string(PathOutcome outcome) noexcept {
  switch (outcome) {
    case PathOutcome::kCompleted:
      return "completed";
    case PathOutcome::kExploded:
      return "exploded";
    case PathOutcome::kAbsorbed:
      return "absorbed";
  }
  return "unknown";
}

StochasticModel gbm_model(double k, double I, double sigma) {
  if (!(k > 0.0) || !(I > 0.0)) {
    throw DomainError("gbm_model: k and I must be positive");
  }
  if (!(sigma >= 0.0)) throw DomainError("gbm_model: sigma must be >= 0");
  const double mu = k * I;
  const double vol = sigma * I;
  std::ostringstream desc;
  desc << "dA = " << mu << "*A dt + " << vol << "*A dW";
  return {[mu](double A) { return mu * A; },
          [vol](double A) { return vol * A; }, ModelLabel::kGbm, desc.str()};
}

double gbm_time_average_exponent(double k, double I, double sigma) {
  if (!(k > 0.0) || !(I > 0.0) || !(sigma >= 0.0)) {
    throw DomainError("gbm_time_average_exponent: need k, I > 0, sigma >= 0");
  }
  const double vol = sigma * I;
  return k * I - 0.5 * vol * vol;
}

StochasticModel hyperbolic_sde_model(double k, double sigma) {
  if (!(k > 0.0)) throw DomainError("hyperbolic_sde_model: k must be positive");
  if (!(sigma >= 0.0)) {
    throw DomainError("hyperbolic_sde_model: sigma must be >= 0");
  }
  std::ostringstream desc;
  desc << "dA = " << k << "*A^2 dt + " << sigma << "*A^2 dW";
  return {[k](double A) { return k * A * A; },
          [sigma](double A) { return sigma * A * A; },
          ModelLabel::kHyperbolicSde, desc.str()};
}

std::uint64_t path_seed(std::uint64_t master_seed,
                        std::uint64_t path_index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~path_index));
}

PathEnd simulate_path(const StochasticModel& model, double A0, double dt,
                      double t_end, std::uint64_t seed,
                      double explosion_threshold,
                      const std::function<void(double, double)>& on_sample) {
  if (!(A0 > 0.0) || !std::isfinite(A0)) {
    throw DomainError("em_path: A0 must be positive and finite");
  }
  if (!(dt > 0.0) || !(t_end > 0.0)) {
    throw DomainError("em_path: dt and t_end must be positive");
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Times are m * dt, with a shorter final step when dt does not divide
  // t_end.
  const auto steps =
      static_cast<std::uint64_t>(std::ceil(t_end / dt * (1.0 - 1e-12)));
  double A = A0;
  on_sample(0.0, A);
  for (std::uint64_t m = 0; m < steps; ++m) {
    const double t = static_cast<double>(m) * dt;
    const double t_next =
        m + 1 == steps ? t_end : static_cast<double>(m + 1) * dt;
    const double h = t_next - t;
    const double z = normal(gen);
    A = A + model.drift(A) * h + model.diffusion(A) * std::sqrt(h) * z;
    if (!std::isfinite(A)) return {PathOutcome::kExploded, t_next};
    if (A <= 0.0) return {PathOutcome::kAbsorbed, t_next};
    on_sample(t_next, A);
    if (A > explosion_threshold) return {PathOutcome::kExploded, t_next};
  }
  return {PathOutcome::kCompleted, std::nullopt};
}

PathResult em_path(const StochasticModel& model, double A0, double dt,
                   double t_end, std::uint64_t seed, const PathOptions& opts) {
  if (opts.record_every == 0) {
    throw DomainError("em_path: record_every must be >= 1");
  }
  PathResult path;
  path.seed = seed;
  std::size_t counter = 0;
  double last_t = 0.0, last_A = A0;
  const PathEnd end = simulate_path(
      model, A0, dt, t_end, seed, opts.explosion_threshold,
      [&](double t, double A) {
        last_t = t;
        last_A = A;
        if (counter++ % opts.record_every == 0) {
          path.times.push_back(t);
          path.values.push_back(A);
        }
      });
  if (path.times.back() != last_t) {
    path.times.push_back(last_t);
    path.values.push_back(last_A);
  }
  path.outcome = end.outcome;
  if (end.outcome == PathOutcome::kExploded) {
    path.explosion_time = end.event_time;
  } else if (end.outcome == PathOutcome::kAbsorbed) {
    path.absorption_time = end.event_time;
  }
  return path;
}

ErgodicityReport ergodicity_check(const StochasticModel& model,
                                  std::span<const double> A_grid,
                                  const ErgodicityOptions& opts) {
  if (A_grid.size() < 3) {
    throw DomainError("ergodicity_check: grid needs at least 3 points");
  }
  if (!std::all_of(A_grid.begin(), A_grid.end(),
                   [](double a) { return a > 0.0 && std::isfinite(a); })) {
    throw DomainError("ergodicity_check: grid points must be positive");
  }
  ErgodicityReport report;
  report.grid.assign(A_grid.begin(), A_grid.end());
  report.u_of_A = "u'(A) = 1/b(A)";

  for (double a : A_grid) {
    const double b = model.diffusion(a);
    if (!(b > 0.0) || !std::isfinite(b)) {
      std::ostringstream msg;
      msg << "diffusion vanishes or is invalid at A = " << a
          << "; no transformation with non-degenerate noise";
      report.reason = msg.str();
      report.constancy_score = std::numeric_limits<double>::infinity();
      return report;
    }
  }

  const auto u_prime = [&](double x) { return 1.0 / model.diffusion(x); };
  for (double a : A_grid) {
    const double b = model.diffusion(a);
    const double drift_term = u_prime(a) * model.drift(a);
    const double ito_term =
        0.5 * central_difference(u_prime, a, opts.relative_step) * b * b;
    report.drift_of_u.push_back(drift_term + ito_term);
    report.term_scale.push_back(std::abs(drift_term) + std::abs(ito_term));
  }

  const auto n = static_cast<double>(A_grid.size());
  report.mean_drift =
      std::accumulate(report.drift_of_u.begin(), report.drift_of_u.end(), 0.0) /
      n;
  const double mean_scale =
      std::accumulate(report.term_scale.begin(), report.term_scale.end(), 0.0) /
      n;
  double deviation = 0.0;
  for (double v : report.drift_of_u) {
    deviation = std::max(deviation, std::abs(v - report.mean_drift));
  }
  double denom = std::abs(report.mean_drift);
  if (denom <= 1e-9 * mean_scale) denom = mean_scale;
  report.constancy_score = denom > 0.0 ? deviation / denom : 0.0;

  report.transform_exists = report.constancy_score < opts.tolerance;
  report.approximate = report.constancy_score < opts.approximate_tolerance;
  if (report.transform_exists) {
    report.reason = "drift of u is constant on the grid";
  } else if (report.approximate) {
    report.reason = "drift of u is nearly constant on the grid";
  } else {
    report.reason = "drift of u depends on A";
  }
  return report;
}

std::function<double(double)> ergodic_drift(
    std::function<double(double)> diffusion, double a_u, double b_u,
    double relative_step) {
  if (!diffusion) throw DomainError("ergodic_drift: empty diffusion");
  if (b_u == 0.0 || !std::isfinite(b_u) || !std::isfinite(a_u)) {
    throw DomainError("ergodic_drift: b_u must be finite and non-zero");
  }
  const double ratio = a_u / b_u;
  return [b = std::move(diffusion), ratio, relative_step](double A) {
    const double bA = b(A);
    return ratio * bA + 0.5 * bA * central_difference(b, A, relative_step);
  };
}

}  // namespace blowup
