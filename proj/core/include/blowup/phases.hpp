#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "blowup/growth_law.hpp"
#include "blowup/ode.hpp"

namespace blowup {

struct PhaseOptions {
  /// Level at which the self-improvement law takes over; I when empty.
  std::optional<double> switch_level;
  /// Evenly spaced samples of the closed-form exponential phase.
  std::size_t phase1_samples = 200;
  IntegrationOptions phase2;
  /// Phase-2 integration horizon, measured from the switch.
  double phase2_horizon = 1e3;
};

/// Exponential growth from A = 1 at factor R per year until the switch
/// level, then an arbitrary growth law from that level.
struct PhasePlan {
  double k = 0.0;
  double R = 0.0;
  double I = 0.0;
  double switch_level = 0.0;
  /// Time of the switch (t1).
  double switch_time = 0.0;
  std::string phase2_law;
  /// Time of the singularity from the start of phase 1, if any.
  std::optional<double> total_blowup_time;
  /// Phase-2 blow-up event on the phase-2 clock.
  std::optional<BlowUpEvent> phase2_blowup;
  Termination phase2_termination = Termination::kHorizon;
  /// Both phases on the phase-1 clock. The switch sample appears once.
  Trajectory trajectory;
  /// Index of the switch sample in trajectory.
  std::size_t switch_index = 0;
};

/// Throws DomainError for R <= 1, I < 1, a switch level outside [1, I], or
/// a phase-2 law that is not positive at the switch level.
[[nodiscard]] PhasePlan compose_phases(double R, double I,
                                       const GrowthLaw& phase2_law,
                                       const PhaseOptions& opts = {});

}  // namespace blowup
