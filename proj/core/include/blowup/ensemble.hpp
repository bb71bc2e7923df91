#pragma once

// Monte Carlo ensembles of Euler-Maruyama paths.
//
// Every path draws from its own generator seeded by
// path_seed(master_seed, index), and per-path results are merged in index
// order, so statistics do not depend on the thread count or schedule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "blowup/sde.hpp"

namespace blowup {

struct EnsembleSpec {
  StochasticModel model;
  double A0 = 1.0;
  double dt = 0.01;
  double t_end = 200.0;
  std::size_t n_paths = 1000;
  std::uint64_t master_seed = 42;
  double explosion_threshold = 1e9;
};

struct ExecutionOptions {
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct PathSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  PathOutcome outcome = PathOutcome::kCompleted;
  /// Explosion or absorption time.
  std::optional<double> event_time;
  /// Last positive finite value reached.
  double terminal_value = 0.0;
  /// Least-squares slope of ln A against t before the path ended; empty
  /// with fewer than 10 samples.
  std::optional<double> log_slope;
};

struct Quantiles {
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;

  [[nodiscard]] double interquartile_range() const { return q75 - q25; }
};

struct EnsembleStats {
  std::size_t n_paths = 0;
  std::size_t exploded = 0;
  std::size_t absorbed = 0;
  double exploded_fraction = 0.0;
  double absorbed_fraction = 0.0;
  /// Ascending explosion times of exploded paths.
  std::vector<double> blowup_times;
  /// Quantiles of blowup_times; empty when nothing exploded.
  std::optional<Quantiles> blowup_quantiles;
  /// Final values of paths that reached t_end, in path order.
  std::vector<double> terminal_values;
  std::size_t slope_count = 0;
  double slope_mean = 0.0;
  double slope_stddev = 0.0;
  std::vector<PathSummary> paths;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&);
};

bool operator==(const PathSummary& a, const PathSummary& b);
bool operator==(const Quantiles& a, const Quantiles& b);

[[nodiscard]] EnsembleStats run_ensemble(const EnsembleSpec& spec,
                                         const ExecutionOptions& exec = {});

/// Least-squares slope of ln A against t over the samples before any
/// explosion or absorption. Throws InsufficientDataError with fewer than
/// 10 usable samples.
[[nodiscard]] double pathwise_growth_slope(const PathResult& path);

struct MaskingScanSpec {
  double k = 0.01;
  /// Ascending volatilities.
  std::vector<double> sigmas;
  double A0 = 1.0;
  double dt = 0.01;
  /// Kept below the deterministic blow-up time 1/(k A0) so that the
  /// sigma = 0 reference paths survive to be analysed.
  double t_end = 50.0;
  std::size_t n_paths = 400;
  std::uint64_t master_seed = 42;
  double explosion_threshold = 1e9;
  /// Spacing of the samples handed to the barometer.
  double sample_interval = 1.0;
  /// Barometer window in samples; 0 uses the whole recorded path.
  std::size_t window = 0;
  double z_threshold = 3.0;
};

struct MaskingRow {
  double sigma = 0.0;
  std::size_t paths = 0;
  std::size_t exploded = 0;
  std::size_t absorbed = 0;
  /// Completed paths handed to the barometer.
  std::size_t analyzed = 0;
  std::size_t flagged = 0;
  /// flagged / analyzed; NaN when no path survived.
  double flagged_fraction = 0.0;
};

/// For each sigma, simulates hyperbolic-SDE paths with the same seeds and
/// reports the share of surviving paths whose log trajectory the barometer
/// flags as super-exponential.
[[nodiscard]] std::vector<MaskingRow> volatility_masking_scan(
    const MaskingScanSpec& spec, const ExecutionOptions& exec = {});

}  // namespace blowup
