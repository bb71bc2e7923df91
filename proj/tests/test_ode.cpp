#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/ode.hpp"

using namespace blowup;

namespace {

std::vector<double> checkpoints(double t_end, int n = 20) {
  std::vector<double> t;
  for (int i = 1; i <= n; ++i) t.push_back(t_end * i / n);
  return t;
}

// Max relative error of component `c` against `exact` at the checkpoints.
template <class Exact>
double max_rel_error(const VectorField& field, std::vector<double> y0,
                     double t_end, double rtol, Exact exact,
                     std::size_t c = 0) {
  IntegrationOptions o;
  o.rel_tol = rtol;
  o.abs_tol = rtol * 1e-2;
  o.sample_times = checkpoints(t_end);
  const Trajectory tr = integrate(field, y0, t_end, o);
  EXPECT_EQ(tr.size(), 21U);
  EXPECT_EQ(tr.termination, Termination::kHorizon);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double e = exact(tr.times[i]);
    worst = std::max(worst, std::abs(tr.value(i, c) - e) / std::abs(e));
  }
  return worst;
}

struct OracleCase {
  const char* name;
  GrowthLaw law;
  double A0;
  double t_end;
  std::function<double(double)> exact;
};

std::vector<OracleCase> oracle_cases() {
  const double k = 0.02, I = 3.0;
  std::vector<OracleCase> cases;
  cases.push_back({"exponential", laws::exponential(k, I), 1.0, 50.0,
                   [=](double t) { return exp_phase_solution(1.0, k, I, t); }});
  const double th = hyperbolic_blowup_time(k, I).t_star();
  cases.push_back({"hyperbolic", laws::hyperbolic(k), I, 0.95 * th,
                   [=](double t) { return hyperbolic_solution(k, I, t); }});
  for (double n : {1.5, 2.0, 3.0}) {
    const double tp = powerlaw_blowup_time(k, I, n).t_star();
    cases.push_back({"power", laws::power(k, n), I, 0.95 * tp,
                     [=](double t) { return powerlaw_solution(k, I, n, t); }});
  }
  const double c = 0.3, kl = 0.5;
  cases.push_back({"loglaw", laws::logarithmic(kl), std::exp(std::exp(c)), 4.0,
                   [=](double t) { return loglaw_solution(c, kl, t); }});
  return cases;
}

}  // namespace

TEST(OdeOracle, ScalarClosedFormsWithinTenTimesTolerance) {
  for (const auto& oc : oracle_cases()) {
    const double err = max_rel_error(VectorField::scalar(oc.law), {oc.A0},
                                     oc.t_end, 1e-8, oc.exact);
    EXPECT_LE(err, 1e-7) << oc.name;
  }
}

TEST(OdeOracle, ScalarClosedFormsAtTightTolerance) {
  for (const auto& oc : oracle_cases()) {
    const double err = max_rel_error(VectorField::scalar(oc.law), {oc.A0},
                                     oc.t_end, 1e-11, oc.exact);
    EXPECT_LE(err, 1e-9) << oc.name;
  }
}

TEST(OdeOracle, CoupledGdpSystem) {
  const double k1 = 0.05, k2 = 0.1;
  const std::vector<double> coeffs{k1, k2};
  const std::vector<double> y0{coupled_gdp_initial_gdp(k1, k2), 1.0};
  const double err =
      max_rel_error(multiplicative_field(coeffs), y0, 0.95 * 20.0, 1e-8,
                    [=](double t) { return coupled_gdp_solution(k1, t); }, 1);
  EXPECT_LE(err, 1e-7);
}

TEST(OdeBlowUp, HyperbolicReferenceTimes) {
  for (const auto& [k, expected] : {std::pair{0.01, 100.0}, {0.05, 20.0}}) {
    const std::vector<double> y0{1.0};
    const BlowUpSearch s = estimate_blowup_time(
        VectorField::scalar(laws::hyperbolic(k)), y0);
    ASSERT_TRUE(s.found());
    EXPECT_EQ(s.termination, Termination::kBlowUp);
    EXPECT_NEAR(s.event->estimate, expected, 1e-6 * expected);
    EXPECT_LE(s.event->t_low, s.event->estimate);
    EXPECT_GE(s.event->t_high, s.event->estimate);
    EXPECT_LT(s.event->threshold_time, expected);
  }
}

TEST(OdeBlowUp, PowerLawsAcrossExponents) {
  for (double n : {1.2, 1.5, 3.0, 5.0, 10.0}) {
    const std::vector<double> y0{1.0};
    const BlowUpSearch s =
        estimate_blowup_time(VectorField::scalar(laws::power(1.0, n)), y0);
    ASSERT_TRUE(s.found()) << n;
    const double exact = 1.0 / (n - 1.0);
    EXPECT_NEAR(s.event->estimate / exact, 1.0, 1e-3) << n;
  }
}

TEST(OdeBlowUp, TighterToleranceTightensEstimate) {
  IntegrationOptions o;
  o.blowup_tol = 1e-8;
  const std::vector<double> y0{1.0};
  const BlowUpSearch s =
      estimate_blowup_time(VectorField::scalar(laws::power(1.0, 1.5)), y0, o);
  ASSERT_TRUE(s.found());
  EXPECT_NEAR(s.event->estimate, 2.0, 1e-6);
}

TEST(OdeBlowUp, ScaledLawScalesTime) {
  const std::vector<double> y0{1.0};
  const double base =
      estimate_blowup_time(VectorField::scalar(laws::power(1.0, 3.0)), y0)
          .event->estimate;
  for (double c : {0.1, 7.0}) {
    const double t = estimate_blowup_time(
                         VectorField::scalar(laws::power(1.0, 3.0).scaled(c)), y0)
                         .event->estimate;
    EXPECT_NEAR(t * c / base, 1.0, 1e-6);
  }
}

TEST(OdeBlowUp, SymmetricTripleProduct) {
  // E1 = E2 = E3 = E gives dE = E^3 and t* = 1/(2 E0^2).
  const std::vector<double> coeffs{1.0, 1.0, 1.0};
  const std::vector<double> y0{2.0, 2.0, 2.0};
  const BlowUpSearch s = estimate_blowup_time(multiplicative_field(coeffs), y0);
  ASSERT_TRUE(s.found());
  EXPECT_NEAR(s.event->estimate, 0.125, 1e-6);
}

TEST(OdeBlowUp, UnboundedWithoutSingularity) {
  const std::vector<double> y0{std::exp(1.0)};
  for (const GrowthLaw& law : {laws::logarithmic(1.0), laws::power(1.0, 1.0),
                               laws::shifted_logarithmic(1.0)}) {
    const BlowUpSearch s = estimate_blowup_time(VectorField::scalar(law), y0);
    EXPECT_FALSE(s.found()) << law.name();
    EXPECT_EQ(s.termination, Termination::kRangeExhausted) << law.name();
  }
}

TEST(OdeBlowUp, BoundedGrowthReachesHorizon) {
  IntegrationOptions o;
  o.horizon = 50.0;
  const std::vector<double> y0{1.0};
  const BlowUpSearch s = estimate_blowup_time(
      VectorField::scalar(GrowthLaw("const", [](double) { return 0.0; })), y0, o);
  EXPECT_FALSE(s.found());
  EXPECT_EQ(s.termination, Termination::kHorizon);
  EXPECT_DOUBLE_EQ(s.t_reached, 50.0);
}

TEST(OdeIntegrate, StopsBelowThreshold) {
  const std::vector<double> y0{1.0};
  const Trajectory tr =
      integrate(VectorField::scalar(laws::hyperbolic(0.01)), y0, 200.0);
  ASSERT_TRUE(tr.blowup.has_value());
  EXPECT_EQ(tr.termination, Termination::kBlowUp);
  for (const auto& s : tr.states) EXPECT_LE(s[0], 1e9);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
  EXPECT_LT(tr.times.back(), 100.0);
}

TEST(OdeIntegrate, HorizonBeforeSingularity) {
  const std::vector<double> y0{1.0};
  const Trajectory tr =
      integrate(VectorField::scalar(laws::hyperbolic(0.01)), y0, 50.0);
  EXPECT_FALSE(tr.blowup.has_value());
  EXPECT_EQ(tr.termination, Termination::kHorizon);
  EXPECT_DOUBLE_EQ(tr.times.back(), 50.0);
  EXPECT_NEAR(tr.states.back()[0], 2.0, 1e-7);
}

TEST(OdeIntegrate, RecordsRequestedTimesExactly) {
  IntegrationOptions o;
  o.sample_times = {0.5, 1.0, 2.5};
  const std::vector<double> y0{1.0};
  const Trajectory tr =
      integrate(VectorField::scalar(laws::exponential(1.0, 1.0)), y0, 2.5, o);
  ASSERT_EQ(tr.size(), 4U);
  EXPECT_EQ(tr.times[0], 0.0);
  EXPECT_EQ(tr.times[1], 0.5);
  EXPECT_EQ(tr.times[3], 2.5);
  EXPECT_NEAR(tr.states[3][0], std::exp(2.5), 1e-7 * std::exp(2.5));
}

TEST(OdeIntegrate, ConstantRateIsLinear) {
  IntegrationOptions o;
  o.sample_times = checkpoints(10.0);
  const std::vector<double> y0{3.0};
  const Trajectory tr = integrate(
      VectorField::scalar(GrowthLaw("one", [](double) { return 1.0; })), y0, 10.0,
      o);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr.states[i][0], 3.0 + tr.times[i], 1e-12);
  }
}

TEST(OdeIntegrate, Deterministic) {
  const std::vector<double> y0{1.0};
  const auto f = VectorField::scalar(laws::power(0.3, 2.5));
  const Trajectory a = integrate(f, y0, 100.0);
  const Trajectory b = integrate(f, y0, 100.0);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.blowup->estimate, b.blowup->estimate);
}

TEST(OdeErrors, InvalidInput) {
  const auto f = VectorField::scalar(laws::hyperbolic(1.0));
  const std::vector<double> bad{-1.0};
  EXPECT_THROW((void)integrate(f, bad, 1.0), DomainError);
  const std::vector<double> two{1.0, 1.0};
  EXPECT_THROW((void)integrate(f, two, 1.0), DomainError);
  const std::vector<double> one{1.0};
  EXPECT_THROW((void)integrate(f, one, -1.0), DomainError);
}

TEST(OdeErrors, NonFiniteField) {
  const auto f = VectorField::scalar(GrowthLaw("nan", [](double) { return NAN; }));
  const std::vector<double> y0{1.0};
  try {
    (void)integrate(f, y0, 1.0);
    FAIL();
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), IntegrationError::Kind::kField);
  }
}

TEST(OdeNames, ScalarAndDefaultNames) {
  EXPECT_EQ(VectorField::scalar(laws::hyperbolic(1.0)).names(),
            std::vector<std::string>{"A"});
  const std::vector<double> coeffs{1.0, 2.0};
  EXPECT_EQ(multiplicative_field(coeffs).names(),
            (std::vector<std::string>{"E0", "E1"}));
  EXPECT_STREQ(to_string(Termination::kRangeExhausted), "range-exhausted");
  EXPECT_STREQ(to_string(BlowUpMethod::kThresholdCrossing), "threshold-crossing");
}
