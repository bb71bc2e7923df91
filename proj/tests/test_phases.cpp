#include <gtest/gtest.h>

#include <cmath>

#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/phases.hpp"

using namespace blowup;

TEST(Phases, DefaultScenarioTotalTime) {
  const double k = calibrate_k(1.5872, 100.0);
  const PhasePlan plan = compose_phases(1.5872, 100.0, laws::hyperbolic(k));
  EXPECT_NEAR(plan.switch_time, std::log(100.0) / std::log(1.5872), 1e-12);
  ASSERT_TRUE(plan.total_blowup_time.has_value());
  EXPECT_NEAR(*plan.total_blowup_time, 12.13, 0.02);
  EXPECT_NEAR(*plan.total_blowup_time, (std::log(100.0) + 1.0) / std::log(1.5872),
              1e-6);
  EXPECT_EQ(plan.phase2_termination, Termination::kBlowUp);
  ASSERT_TRUE(plan.trajectory.blowup.has_value());
  EXPECT_EQ(plan.trajectory.blowup->estimate, *plan.total_blowup_time);
  EXPECT_NEAR(plan.phase2_blowup->estimate, 1.0 / std::log(1.5872), 1e-6);
}

TEST(Phases, LogLawNeverBlowsUp) {
  const double k = calibrate_k(1.5872, 100.0);
  const PhasePlan plan = compose_phases(1.5872, 100.0, laws::logarithmic(k));
  EXPECT_FALSE(plan.total_blowup_time.has_value());
  EXPECT_NE(plan.phase2_termination, Termination::kBlowUp);
}

TEST(Phases, UnitIntelligenceSkipsPhaseOne) {
  const PhasePlan plan = compose_phases(std::exp(1.0), 1.0, laws::hyperbolic(1.0));
  EXPECT_EQ(plan.switch_time, 0.0);
  EXPECT_EQ(plan.switch_index, 0U);
  ASSERT_TRUE(plan.total_blowup_time.has_value());
  EXPECT_NEAR(*plan.total_blowup_time, 1.0, 1e-6);
}

TEST(Phases, ContinuousAtSwitch) {
  const double k = calibrate_k(1.5872, 100.0);
  const PhasePlan plan = compose_phases(1.5872, 100.0, laws::hyperbolic(k));
  const Trajectory& tr = plan.trajectory;
  EXPECT_EQ(tr.value(plan.switch_index, 0), 100.0);
  EXPECT_EQ(tr.times[plan.switch_index], plan.switch_time);
  // The first phase-2 step starts from exactly I.
  const double t_next = tr.times[plan.switch_index + 1] - plan.switch_time;
  const double A_next = tr.value(plan.switch_index + 1, 0);
  EXPECT_NEAR(A_next, hyperbolic_solution(k, 100.0, t_next), 1e-7 * A_next);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    EXPECT_GT(tr.times[i], tr.times[i - 1]);
    EXPECT_GE(tr.value(i, 0), tr.value(i - 1, 0));
  }
  for (std::size_t i = 0; i < plan.switch_index; ++i) {
    EXPECT_NEAR(tr.value(i, 0), std::pow(1.5872, tr.times[i]),
                1e-12 * tr.value(i, 0));
  }
}

TEST(Phases, EarlierSwitchLevel) {
  PhaseOptions o;
  o.switch_level = 50.0;
  const double k = calibrate_k(1.5872, 100.0);
  const PhasePlan plan = compose_phases(1.5872, 100.0, laws::hyperbolic(k), o);
  EXPECT_NEAR(plan.switch_time, std::log(50.0) / std::log(1.5872), 1e-12);
  EXPECT_EQ(plan.trajectory.value(plan.switch_index, 0), 50.0);
  EXPECT_NEAR(*plan.total_blowup_time, plan.switch_time + 1.0 / (k * 50.0), 1e-5);
}

TEST(Phases, Errors) {
  const GrowthLaw law = laws::hyperbolic(0.01);
  EXPECT_THROW((void)compose_phases(1.0, 100.0, law), DomainError);
  EXPECT_THROW((void)compose_phases(1.5, 0.5, law), DomainError);
  PhaseOptions o;
  o.switch_level = 200.0;
  EXPECT_THROW((void)compose_phases(1.5, 100.0, law, o), DomainError);
  const GrowthLaw zero("zero", [](double) { return 0.0; });
  EXPECT_THROW((void)compose_phases(1.5, 100.0, zero), DomainError);
}
