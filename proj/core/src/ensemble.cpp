#include "blowup/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "blowup/barometer.hpp"
#include "blowup/error.hpp"
#include "blowup/regression.hpp"

namespace blowup {
namespace {

constexpr std::size_t kMinSlopeSamples = 10;

// Runs body(i) for i in [0, n) on contiguous chunks. Each index is owned by
// exactly one worker, so results written to slot i are schedule-independent.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PathSummary summarize_path(const EnsembleSpec& spec, std::size_t index) {
  PathSummary s;
  s.index = index;
  s.seed = path_seed(spec.master_seed, index);
  OnlineRegression fit;
  double last = spec.A0;
  const PathEnd end = simulate_path(
      spec.model, spec.A0, spec.dt, spec.t_end, s.seed,
      spec.explosion_threshold, [&](double t, double A) {
        last = A;
        if (A <= spec.explosion_threshold) fit.add(t, std::log(A));
      });
  s.outcome = end.outcome;
  s.event_time = end.event_time;
  s.terminal_value = last;
  if (fit.count() >= kMinSlopeSamples) s.log_slope = fit.slope();
  return s;
}

bool same(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

bool operator==(const PathSummary& a, const PathSummary& b) {
  return a.index == b.index && a.seed == b.seed && a.outcome == b.outcome &&
         a.event_time == b.event_time && same(a.terminal_value, b.terminal_value) &&
         a.log_slope == b.log_slope;
}

bool operator==(const Quantiles& a, const Quantiles& b) {
  return a.q05 == b.q05 && a.q25 == b.q25 && a.q50 == b.q50 &&
         a.q75 == b.q75 && a.q95 == b.q95;
}

bool operator==(const EnsembleStats& a, const EnsembleStats& b) {
  return a.n_paths == b.n_paths && a.exploded == b.exploded &&
         a.absorbed == b.absorbed && a.blowup_times == b.blowup_times &&
         a.blowup_quantiles == b.blowup_quantiles &&
         a.terminal_values == b.terminal_values &&
         a.slope_count == b.slope_count && same(a.slope_mean, b.slope_mean) &&
         same(a.slope_stddev, b.slope_stddev) && a.paths == b.paths;
}

EnsembleStats run_ensemble(const EnsembleSpec& spec,
                           const ExecutionOptions& exec) {
  if (spec.n_paths == 0) throw DomainError("run_ensemble: n_paths must be >= 1");
  if (!(spec.dt > 0.0)) throw DomainError("run_ensemble: dt must be positive");
  if (!spec.model.drift || !spec.model.diffusion) {
    throw DomainError("run_ensemble: model has no drift or diffusion");
  }

  EnsembleStats stats;
  stats.n_paths = spec.n_paths;
  stats.paths.resize(spec.n_paths);
  parallel_for(spec.n_paths, exec.threads, [&](std::size_t i) {
    stats.paths[i] = summarize_path(spec, i);
  });

  // Serial merge in index order.
  double slope_sum = 0.0;
  std::vector<double> slopes;
  for (const PathSummary& p : stats.paths) {
    switch (p.outcome) {
      case PathOutcome::kExploded:
        ++stats.exploded;
        stats.blowup_times.push_back(*p.event_time);
        break;
      case PathOutcome::kAbsorbed:
        ++stats.absorbed;
        break;
      case PathOutcome::kCompleted:
        stats.terminal_values.push_back(p.terminal_value);
        break;
    }
    if (p.log_slope && std::isfinite(*p.log_slope)) {
      slopes.push_back(*p.log_slope);
      slope_sum += *p.log_slope;
    }
  }
  const auto n = static_cast<double>(spec.n_paths);
  stats.exploded_fraction = static_cast<double>(stats.exploded) / n;
  stats.absorbed_fraction = static_cast<double>(stats.absorbed) / n;
  std::sort(stats.blowup_times.begin(), stats.blowup_times.end());
  if (!stats.blowup_times.empty()) {
    const auto& bt = stats.blowup_times;
    stats.blowup_quantiles =
        Quantiles{quantile_sorted(bt, 0.05), quantile_sorted(bt, 0.25),
                  quantile_sorted(bt, 0.50), quantile_sorted(bt, 0.75),
                  quantile_sorted(bt, 0.95)};
  }
  stats.slope_count = slopes.size();
  if (slopes.empty()) {
    stats.slope_mean = stats.slope_stddev =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    stats.slope_mean = slope_sum / static_cast<double>(slopes.size());
    double ss = 0.0;
    for (double s : slopes) ss += (s - stats.slope_mean) * (s - stats.slope_mean);
    stats.slope_stddev =
        slopes.size() > 1 ? std::sqrt(ss / static_cast<double>(slopes.size() - 1))
                          : 0.0;
  }
  return stats;
}

double pathwise_growth_slope(const PathResult& path) {
  const double end = path.explosion_time.value_or(
      path.absorption_time.value_or(std::numeric_limits<double>::infinity()));
  OnlineRegression fit;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    if (path.times[i] >= end) break;
    if (path.values[i] > 0.0 && std::isfinite(path.values[i])) {
      fit.add(path.times[i], std::log(path.values[i]));
    }
  }
  if (fit.count() < kMinSlopeSamples) {
    throw InsufficientDataError("pathwise_growth_slope: " +
                                std::to_string(fit.count()) +
                                " usable samples, need " +
                                std::to_string(kMinSlopeSamples));
  }
  return fit.slope();
}

std::vector<MaskingRow> volatility_masking_scan(const MaskingScanSpec& spec,
                                                const ExecutionOptions& exec) {
  if (spec.sigmas.empty()) {
    throw DomainError("volatility_masking_scan: empty sigma list");
  }
  if (!std::is_sorted(spec.sigmas.begin(), spec.sigmas.end())) {
    throw DomainError("volatility_masking_scan: sigmas must be ascending");
  }
  if (!(spec.sample_interval >= spec.dt)) {
    throw DomainError("volatility_masking_scan: sample_interval below dt");
  }
  const auto stride =
      static_cast<std::size_t>(std::llround(spec.sample_interval / spec.dt));

  std::vector<MaskingRow> rows;
  for (double sigma : spec.sigmas) {
    const StochasticModel model = hyperbolic_sde_model(spec.k, sigma);
    struct Outcome {
      PathOutcome outcome = PathOutcome::kCompleted;
      bool flagged = false;
    };
    std::vector<Outcome> outcomes(spec.n_paths);
    parallel_for(spec.n_paths, exec.threads, [&](std::size_t i) {
      PathOptions opts;
      opts.explosion_threshold = spec.explosion_threshold;
      opts.record_every = stride;
      const PathResult path = em_path(model, spec.A0, spec.dt, spec.t_end,
                                      path_seed(spec.master_seed, i), opts);
      outcomes[i].outcome = path.outcome;
      if (path.outcome != PathOutcome::kCompleted) return;
      const std::size_t window =
          spec.window == 0 ? path.values.size()
                           : std::min(spec.window, path.values.size());
      outcomes[i].flagged =
          barometer(path.times, path.values, window, spec.z_threshold).flagged;
    });

    MaskingRow row;
    row.sigma = sigma;
    row.paths = spec.n_paths;
    for (const Outcome& o : outcomes) {
      if (o.outcome == PathOutcome::kExploded) ++row.exploded;
      if (o.outcome == PathOutcome::kAbsorbed) ++row.absorbed;
      if (o.outcome == PathOutcome::kCompleted) {
        ++row.analyzed;
        if (o.flagged) ++row.flagged;
      }
    }
    row.flagged_fraction =
        row.analyzed == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(row.flagged) /
                                static_cast<double>(row.analyzed);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace blowup
