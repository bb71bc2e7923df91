#include "blowup/phases.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/model.hpp"

namespace blowup {

PhasePlan compose_phases(double R, double I, const GrowthLaw& phase2_law,
                         const PhaseOptions& opts) {
  if (!(R > 1.0)) throw DomainError("compose_phases: R must exceed 1");
  if (!(I >= 1.0)) throw DomainError("compose_phases: I must be at least 1");
  const double level = opts.switch_level.value_or(I);
  if (!(level >= 1.0 && level <= I)) {
    throw DomainError("compose_phases: switch level must lie in [1, I]");
  }
  if (opts.phase1_samples < 2) {
    throw DomainError("compose_phases: need at least 2 phase-1 samples");
  }
  const double f_switch = phase2_law(level);
  if (!(f_switch > 0.0) || !std::isfinite(f_switch)) {
    throw DomainError("compose_phases: phase-2 law " + phase2_law.name() +
                      " is not positive at the switch level " +
                      std::to_string(level));
  }

  PhasePlan plan;
  plan.R = R;
  plan.I = I;
  plan.k = calibrate_k(R, I);
  plan.switch_level = level;
  plan.switch_time = std::log(level) / std::log(R);
  plan.phase2_law = phase2_law.name();

  Trajectory& traj = plan.trajectory;
  // A zero-length phase 1 (I = 1) contributes only the switch sample.
  const std::size_t n1 = plan.switch_time > 0.0 ? opts.phase1_samples : 1;
  for (std::size_t i = 0; i < n1; ++i) {
    const double t =
        n1 == 1 ? 0.0
                : plan.switch_time * static_cast<double>(i) /
                      static_cast<double>(n1 - 1);
    traj.times.push_back(t);
    traj.states.push_back({exp_phase_solution(1.0, plan.k, I, t)});
  }
  // Both phases share the exact boundary value.
  traj.times.back() = plan.switch_time;
  traj.states.back() = {level};
  plan.switch_index = n1 - 1;

  const std::vector<double> start{level};
  const Trajectory tail = integrate(VectorField::scalar(phase2_law), start,
                                    opts.phase2_horizon, opts.phase2);
  for (std::size_t i = 1; i < tail.size(); ++i) {
    traj.times.push_back(plan.switch_time + tail.times[i]);
    traj.states.push_back(tail.states[i]);
  }
  plan.phase2_termination = tail.termination;
  traj.termination = tail.termination;
  if (tail.blowup) {
    plan.phase2_blowup = tail.blowup;
    BlowUpEvent shifted = *tail.blowup;
    shifted.t_low += plan.switch_time;
    shifted.t_high += plan.switch_time;
    shifted.estimate += plan.switch_time;
    shifted.threshold_time += plan.switch_time;
    traj.blowup = shifted;
    plan.total_blowup_time = shifted.estimate;
  }
  return plan;
}

}  // namespace blowup
