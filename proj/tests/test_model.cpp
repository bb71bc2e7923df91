#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "blowup/error.hpp"
#include "blowup/model.hpp"

using namespace blowup;

namespace {

// 30-digit reference values computed offline with mpmath.
constexpr double kRefK = 0.00461971457548471294612287598928;
constexpr double kRefT1 = 9.96851669240821974069849839549;
constexpr double kRefT2 = 2.16463589613667267690455997294;
constexpr double kRefTs = 12.1331525885448924176030583684;

}  // namespace

TEST(Calibration, DefaultScenarioMatchesHighPrecisionValues) {
  EXPECT_NEAR(calibrate_k(kDefaultGrowthFactor, kDefaultIntelligenceRatio), kRefK,
              1e-17);
  EXPECT_NEAR(phase1_duration(kDefaultGrowthFactor, kDefaultIntelligenceRatio),
              kRefT1, 1e-13);
  const double k = calibrate_k(kDefaultGrowthFactor, kDefaultIntelligenceRatio);
  EXPECT_NEAR(hyperbolic_blowup_time(k, 100.0).t_star(), kRefT2, 1e-13);
  EXPECT_NEAR(total_singularity_time(kDefaultGrowthFactor, 100.0), kRefTs, 1e-13);
}

TEST(Calibration, PublishedRoundedFigures) {
  // Quoted to two or three digits: k ~ 0.00462, t1 ~ 9.97, t2 ~ 2.16,
  // t_s ~ 12 years.
  const double k = calibrate_k(1.5872, 100.0);
  EXPECT_NEAR(k, 0.00462, 1e-5);
  EXPECT_NEAR(phase1_duration(1.5872, 100.0), 9.97, 0.005);
  EXPECT_NEAR(hyperbolic_blowup_time(k, 100.0).t_star(), 2.16, 0.006);
  EXPECT_NEAR(total_singularity_time(1.5872, 100.0), 12.0, 0.2);
}

TEST(Calibration, PhaseOneDurationViaBase10Logs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> R(1.01, 5.0), I(1.0, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double r = R(rng), ii = I(rng);
    EXPECT_NEAR(phase1_duration(r, ii), std::log10(ii) / std::log10(r),
                1e-12 * (1.0 + phase1_duration(r, ii)));
  }
}

TEST(ExponentialPhase, ReachesIAtPhaseOneDuration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> R(1.01, 5.0), I(1.0, 1e6);
  for (int i = 0; i < 500; ++i) {
    const ScenarioParams p = ScenarioParams::calibrated(R(rng), I(rng));
    const double A = exp_phase_solution(p, phase1_duration(p.R, p.I));
    EXPECT_NEAR(A / p.I, 1.0, 1e-9) << "R=" << p.R << " I=" << p.I;
  }
}

TEST(ExponentialPhase, GrowsByRPerYear) {
  const ScenarioParams p = ScenarioParams::calibrated(1.5872, 100.0);
  for (double t = 0.0; t < 10.0; t += 0.5) {
    EXPECT_NEAR(exp_phase_solution(p, t + 1.0) / exp_phase_solution(p, t), 1.5872,
                1e-12);
  }
}

TEST(ExponentialPhase, RejectsBadInput) {
  EXPECT_THROW((void)exp_phase_solution(1.0, 0.1, 10.0, -1.0), DomainError);
  EXPECT_THROW((void)calibrate_k(1.0, 100.0), DomainError);
  EXPECT_THROW((void)calibrate_k(0.5, 100.0), DomainError);
  EXPECT_THROW((void)phase1_duration(1.5, 0.5), DomainError);
  EXPECT_EQ(phase1_duration(1.5, 1.0), 0.0);
}

TEST(Hyperbolic, StartsAtIAndMatchesPowerLawTwo) {
  const double k = 0.01, I = 3.0;
  EXPECT_EQ(hyperbolic_solution(k, I, 0.0), I);
  for (double t = 0.0; t < 0.99 / (k * I); t += 1.0) {
    EXPECT_NEAR(hyperbolic_solution(k, I, t) / powerlaw_solution(k, I, 2.0, t), 1.0,
                1e-12);
  }
}

TEST(Hyperbolic, DslTranscriptionValue) {
  // -1/(k t - 1/I) with k = 0.00462, I = 100, t = 1.
  EXPECT_NEAR(hyperbolic_solution(0.00462, 100.0, 1.0), 185.873605947955390334,
              1e-10);
}

TEST(Hyperbolic, RefusesTimesPastSingularity) {
  EXPECT_THROW((void)hyperbolic_solution(0.01, 1.0, 100.0), DomainError);
  EXPECT_THROW((void)hyperbolic_solution(0.01, 1.0, 150.0), DomainError);
  try {
    (void)hyperbolic_solution(0.01, 1.0, 120.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("t_star = 100"), std::string::npos);
  }
}

TEST(Hyperbolic, BlowUpTimes) {
  EXPECT_DOUBLE_EQ(hyperbolic_blowup_time(0.01, 1.0).t_star(), 100.0);
  EXPECT_DOUBLE_EQ(hyperbolic_blowup_time(0.05, 1.0).t_star(), 20.0);
  EXPECT_THROW((void)hyperbolic_blowup_time(0.0, 1.0), DomainError);
}

TEST(PowerLaw, BlowUpTimeFormula) {
  struct Case {
    double n, expected;
  };
  // 1 / ((n - 1) k I^(n-1)) with k = 0.01, I = 100 (mpmath).
  const Case cases[] = {{1.0001, 999539.589003087845528},
                        {1.5, 20.0},
                        {2.0, 1.0},
                        {3.0, 0.005},
                        {10.0, 1.11111111111111111e-17},
                        {100.0, 1.01010101010101010e-198}};
  for (const auto& c : cases) {
    EXPECT_NEAR(powerlaw_blowup_time(0.01, 100.0, c.n).t_star() / c.expected, 1.0,
                1e-10)
        << "n=" << c.n;
  }
}

TEST(PowerLaw, NoSingularityAtOrBelowLinear) {
  EXPECT_FALSE(powerlaw_blowup_time(0.01, 100.0, 1.0).finite());
  EXPECT_FALSE(powerlaw_blowup_time(0.01, 100.0, 0.5).finite());
  EXPECT_THROW((void)powerlaw_blowup_time(0.01, 100.0, 0.5).t_star(), DomainError);
}

TEST(PowerLaw, BlowUpTimeDecreasesWithExponent) {
  double prev = INFINITY;
  for (double n = 1.05; n < 20.0; n += 0.05) {
    const double t = powerlaw_blowup_time(0.01, 100.0, n).t_star();
    EXPECT_LT(t, prev) << "n=" << n;
    prev = t;
  }
}

TEST(PowerLaw, SolutionSatisfiesOde) {
  // Central difference of the closed form against k A^n.
  const double k = 0.02, I = 2.0;
  for (double n : {1.5, 2.5, 3.0}) {
    const double ts = powerlaw_blowup_time(k, I, n).t_star();
    for (double f : {0.1, 0.4, 0.8}) {
      const double t = f * ts, h = 1e-5 * ts;
      const double d = (powerlaw_solution(k, I, n, t + h) -
                        powerlaw_solution(k, I, n, t - h)) / (2 * h);
      const double A = powerlaw_solution(k, I, n, t);
      EXPECT_NEAR(d / (k * std::pow(A, n)), 1.0, 1e-6);
    }
  }
}

TEST(LogLaw, DoubleExponentialValues) {
  EXPECT_NEAR(loglaw_solution(0.0, 1.0, 1.0), 15.1542622414792641898, 1e-12);
  EXPECT_NEAR(loglaw_solution(0.0, 1.0, 0.0), std::exp(1.0), 1e-15);
  EXPECT_THROW((void)loglaw_solution(0.0, 1.0, 10.0), OverflowError);
}

TEST(CoupledGdp, ClosedForm) {
  EXPECT_DOUBLE_EQ(coupled_gdp_solution(0.05, 10.0), 2.0);
  EXPECT_DOUBLE_EQ(coupled_gdp_initial_gdp(0.05, 0.1), 0.5);
  EXPECT_THROW((void)coupled_gdp_solution(0.05, 20.0), DomainError);
}

TEST(BlowUpTimeType, FiniteAndInfinite) {
  const BlowUpTime f = BlowUpTime::finite_at(3.0);
  EXPECT_TRUE(f.finite());
  EXPECT_EQ(f.t_star(), 3.0);
  EXPECT_FALSE(BlowUpTime::infinite().finite());
  EXPECT_EQ(BlowUpTime::infinite(), BlowUpTime{});
  EXPECT_THROW((void)BlowUpTime::finite_at(-1.0), DomainError);
}
