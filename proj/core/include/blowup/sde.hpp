#pragma once

// Euler-Maruyama simulation of autonomous Ito processes
//   dA = a(A) dt + b(A) dW
// and the ergodicity (constant-drift) transformation check.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blowup {

enum class ModelLabel { kGbm, kHyperbolicSde, kCustom };

[[nodiscard]] const char* to_string(ModelLabel label) noexcept;

/// State-dependent drift and diffusion. Both callables must be pure.
struct StochasticModel {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  ModelLabel label = ModelLabel::kCustom;
  std::string description;
};

/// dA = k I A dt + sigma I A dW.
[[nodiscard]] StochasticModel gbm_model(double k, double I, double sigma);

/// Almost-sure long-run slope of ln A for gbm_model: k I - (sigma I)^2 / 2.
[[nodiscard]] double gbm_time_average_exponent(double k, double I,
                                               double sigma);

/// dA = k A^2 dt + sigma A^2 dW.
[[nodiscard]] StochasticModel hyperbolic_sde_model(double k, double sigma);

enum class PathOutcome {
  kCompleted,  // reached t_end
  kExploded,   // exceeded the explosion threshold or became non-finite
  kAbsorbed,   // stepped to A <= 0 (a discretisation artefact)
};

[[nodiscard]] const char* to_string(PathOutcome outcome) noexcept;

struct PathResult {
  std::vector<double> times;
  std::vector<double> values;
  PathOutcome outcome = PathOutcome::kCompleted;
  /// Time of the first sample above the threshold; set iff exploded.
  std::optional<double> explosion_time;
  /// Time of the first non-positive step; set iff absorbed.
  std::optional<double> absorption_time;
  std::uint64_t seed = 0;

  [[nodiscard]] bool exploded() const noexcept {
    return outcome == PathOutcome::kExploded;
  }
};

struct PathOptions {
  double explosion_threshold = 1e9;
  /// Record every n-th step (the start and the final state are always
  /// recorded).
  std::size_t record_every = 1;
};

/// Per-path seed derived from (master_seed, path_index) with splitmix64.
[[nodiscard]] std::uint64_t path_seed(std::uint64_t master_seed,
                                      std::uint64_t path_index) noexcept;

/// Streaming form of em_path: calls on_sample(t, A) for each step (A > 0
/// and finite, below or at the first threshold crossing) and returns the
/// outcome with its time. The generator is std::mt19937_64 seeded with
/// `seed`, normals come from std::normal_distribution.
struct PathEnd {
  PathOutcome outcome = PathOutcome::kCompleted;
  std::optional<double> event_time;
};
PathEnd simulate_path(const StochasticModel& model, double A0, double dt,
                      double t_end, std::uint64_t seed,
                      double explosion_threshold,
                      const std::function<void(double, double)>& on_sample);

/// A_{m+1} = A_m + a(A_m) dt + b(A_m) sqrt(dt) Z_m. Deterministic for a
/// fixed seed.
[[nodiscard]] PathResult em_path(const StochasticModel& model, double A0,
                                 double dt, double t_end, std::uint64_t seed,
                                 const PathOptions& opts = {});

struct ErgodicityOptions {
  /// constancy_score below this means an exact transformation exists.
  double tolerance = 1e-6;
  /// constancy_score below this means an approximate transformation.
  double approximate_tolerance = 1e-2;
  /// Relative step for central differences.
  double relative_step = 1e-6;
};

struct ErgodicityReport {
  bool transform_exists = false;
  bool approximate = false;
  /// u'(A) = 1/b(A), with the u-diffusion normalised to 1.
  std::string u_of_A;
  std::vector<double> grid;
  /// a_u(A) = u'(A) a(A) + u''(A) b(A)^2 / 2 on the grid.
  std::vector<double> drift_of_u;
  /// |u' a| + |u'' b^2 / 2| on the grid (magnitude of the two terms).
  std::vector<double> term_scale;
  double mean_drift = 0.0;
  /// max |a_u - mean| / |mean|; the mean is replaced by the mean term
  /// scale when the two terms cancel to rounding level.
  double constancy_score = 0.0;
  std::string reason;
};

/// Looks for a change of variable u(A) with constant drift and unit
/// diffusion. Throws DomainError for a grid with fewer than 3 points or a
/// non-positive point.
[[nodiscard]] ErgodicityReport ergodicity_check(
    const StochasticModel& model, std::span<const double> A_grid,
    const ErgodicityOptions& opts = {});

/// Drift a(A) = (a_u/b_u) b(A) + b(A) b'(A) / 2 under which the model
/// admits an exact ergodicity transformation with constants (a_u, b_u).
[[nodiscard]] std::function<double(double)> ergodic_drift(
    std::function<double(double)> diffusion, double a_u, double b_u,
    double relative_step = 1e-6);

}  // namespace blowup
