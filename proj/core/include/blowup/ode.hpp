#pragma once

// Adaptive Runge-Kutta integration of autonomous growth systems
// dE_i = F_i(E) dt with finite-time blow-up detection.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/growth_law.hpp"

namespace blowup {

/// Autonomous vector field E -> F(E). The rate callable writes dE/dt into
/// its output span and must not mutate shared state.
class VectorField {
 public:
  using Rate =
      std::function<void(std::span<const double> state, std::span<double> out)>;

  VectorField(std::size_t dimension, Rate rate,
              std::vector<std::string> names = {});

  /// One-dimensional field dA = F(A) dt.
  static VectorField scalar(const GrowthLaw& law);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  /// Variable names (default "E0", "E1", ... or "A" for scalar fields).
  [[nodiscard]] const std::vector<std::string>& names() const noexcept {
    return names_;
  }

  void operator()(std::span<const double> state, std::span<double> out) const {
    rate_(state, out);
  }

 private:
  std::size_t dimension_;
  Rate rate_;
  std::vector<std::string> names_;
};

enum class BlowUpMethod { kThresholdCrossing, kReciprocalExtrapolation };

[[nodiscard]] const char* to_string(BlowUpMethod method) noexcept;

/// Estimated blow-up time with its bracket.
struct BlowUpEvent {
  double t_low = 0.0;
  double t_high = 0.0;
  double estimate = 0.0;
  BlowUpMethod method = BlowUpMethod::kThresholdCrossing;
  /// Index of the component whose growth drove the estimate.
  std::size_t component = 0;
  /// Time at which the component first exceeded the blow-up threshold.
  double threshold_time = 0.0;
};

/// Why an integration stopped.
enum class Termination {
  kHorizon,         // reached t_end
  kBlowUp,          // threshold crossed and the blow-up time resolved
  kRangeExhausted,  // state left the double range, extrapolated blow-up
                    // times kept drifting: unbounded growth, no singularity
};

[[nodiscard]] const char* to_string(Termination termination) noexcept;

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::optional<BlowUpEvent> blowup;
  Termination termination = Termination::kHorizon;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] double value(std::size_t sample, std::size_t component) const {
    return states.at(sample).at(component);
  }
};

struct IntegrationOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  /// 0 selects the starting step automatically.
  double initial_step = 0.0;
  /// A component above this level counts as blown up.
  double blowup_threshold = 1e9;
  /// Requested bracket width for the blow-up time; defaults to 1e-3 of the
  /// estimate.
  std::optional<double> blowup_tol;
  /// Refine the threshold-crossing time by reciprocal-power extrapolation.
  bool refine_blowup = true;
  /// When non-empty, record states exactly at these ascending times (plus
  /// t = 0) instead of at every accepted step.
  std::vector<double> sample_times;
  /// Integration horizon used by estimate_blowup_time.
  double horizon = 1e6;
  std::size_t max_steps = 5'000'000;
};

/// Integrates from t = 0 to t_end with a Dormand-Prince 5(4) pair. Stops
/// early when a component exceeds opts.blowup_threshold; the returned
/// trajectory then holds only samples below the threshold.
///
/// Throws DomainError for non-positive initial states and IntegrationError
/// on step-size underflow without growth toward the threshold or on a
/// non-finite derivative.
[[nodiscard]] Trajectory integrate(const VectorField& field,
                                   std::span<const double> state0, double t_end,
                                   const IntegrationOptions& opts = {});

struct BlowUpSearch {
  /// Empty when no blow-up occurs within opts.horizon.
  std::optional<BlowUpEvent> event;
  Termination termination = Termination::kHorizon;
  /// Last time the integration reached.
  double t_reached = 0.0;

  [[nodiscard]] bool found() const noexcept { return event.has_value(); }
};

/// Integrates up to opts.horizon without recording and reports the blow-up
/// time, if any.
[[nodiscard]] BlowUpSearch estimate_blowup_time(
    const VectorField& field, std::span<const double> state0,
    const IntegrationOptions& opts = {});

/// dE_i = k_i * prod_j E_j.
[[nodiscard]] VectorField multiplicative_field(std::span<const double> coeffs);

/// Builds multiplicative_field(coeffs) and integrates it.
[[nodiscard]] Trajectory integrate_multiplicative(
    std::span<const double> coeffs, std::span<const double> state0,
    double t_end, const IntegrationOptions& opts = {});

}  // namespace blowup
