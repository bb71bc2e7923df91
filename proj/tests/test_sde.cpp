#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "blowup/ensemble.hpp"
#include "blowup/error.hpp"
#include "blowup/sde.hpp"

using namespace blowup;

namespace {

std::uint64_t reference_splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> integer_grid(int lo, int hi) {
  std::vector<double> g;
  for (int a = lo; a <= hi; ++a) g.push_back(a);
  return g;
}

}  // namespace

TEST(PathSeed, MatchesSplitmixComposition) {
  for (std::uint64_t master : {0ULL, 42ULL, 0xdeadbeefULL}) {
    for (std::uint64_t i : {0ULL, 1ULL, 999ULL}) {
      EXPECT_EQ(path_seed(master, i),
                reference_splitmix(reference_splitmix(master) ^
                                   reference_splitmix(~i)));
    }
  }
}

TEST(PathSeed, DistinctAcrossIndicesAndMasters) {
  std::vector<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 20; ++m) {
    for (std::uint64_t i = 0; i < 200; ++i) seen.push_back(path_seed(m, i));
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
}

TEST(EmPath, ZeroNoiseIsExplicitEuler) {
  const double k = 0.05, dt = 0.01;
  const PathResult p = em_path(hyperbolic_sde_model(k, 0.0), 1.0, dt, 10.0, 1);
  double A = 1.0;
  ASSERT_EQ(p.values.size(), 1001U);
  for (std::size_t m = 1; m < p.values.size(); ++m) {
    const double h = static_cast<double>(m) * dt - static_cast<double>(m - 1) * dt;
    A = A + k * A * A * h;
    EXPECT_EQ(p.values[m], A);
  }
  EXPECT_EQ(p.outcome, PathOutcome::kCompleted);
}

TEST(EmPath, TimeGridEndsExactlyAtHorizon) {
  const PathResult p = em_path(gbm_model(0.05, 1.0, 0.1), 1.0, 0.3, 1.0, 5);
  ASSERT_EQ(p.times.size(), 5U);
  EXPECT_DOUBLE_EQ(p.times[1], 0.3);
  EXPECT_DOUBLE_EQ(p.times[3], 0.9);
  EXPECT_EQ(p.times.back(), 1.0);
}

TEST(EmPath, RecordStrideKeepsEndpoints) {
  PathOptions o;
  o.record_every = 100;
  const PathResult p = em_path(gbm_model(0.05, 1.0, 0.1), 1.0, 0.01, 10.5, 3, o);
  EXPECT_EQ(p.times.front(), 0.0);
  EXPECT_EQ(p.times.back(), 10.5);
  EXPECT_NEAR(p.times[1], 1.0, 1e-12);
  EXPECT_EQ(p.times.size(), 12U);
}

TEST(EmPath, SeedDeterminism) {
  const auto m = hyperbolic_sde_model(0.01, 0.1);
  const PathResult a = em_path(m, 1.0, 0.01, 50.0, 123);
  const PathResult b = em_path(m, 1.0, 0.01, 50.0, 123);
  const PathResult c = em_path(m, 1.0, 0.01, 50.0, 124);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.seed, 123U);
}

TEST(EmPath, DeterministicExplosionNearFormulaTime) {
  // Explicit Euler lags the exact blow-up at 1/(k A0) = 20 slightly.
  const PathResult p = em_path(hyperbolic_sde_model(0.05, 0.0), 1.0, 0.01, 200.0, 1);
  ASSERT_TRUE(p.exploded());
  EXPECT_GT(*p.explosion_time, 20.0);
  EXPECT_LT(*p.explosion_time, 21.0);
  EXPECT_GT(p.values.back(), 1e9);
  EXPECT_FALSE(p.absorption_time.has_value());
}

TEST(EmPath, AbsorptionAndNonFiniteOutcomes) {
  StochasticModel sink{[](double) { return -100.0; }, [](double) { return 0.0; }};
  const PathResult a = em_path(sink, 1.0, 0.1, 5.0, 1);
  EXPECT_EQ(a.outcome, PathOutcome::kAbsorbed);
  EXPECT_DOUBLE_EQ(*a.absorption_time, 0.1);

  StochasticModel nan{[](double) { return NAN; }, [](double) { return 0.0; }};
  const PathResult b = em_path(nan, 1.0, 0.1, 5.0, 1);
  EXPECT_EQ(b.outcome, PathOutcome::kExploded);
  EXPECT_EQ(b.values.size(), 1U);
}

TEST(EmPath, RejectsBadInput) {
  const auto m = gbm_model(0.05, 1.0, 0.1);
  EXPECT_THROW((void)em_path(m, 0.0, 0.01, 1.0, 1), DomainError);
  EXPECT_THROW((void)em_path(m, 1.0, 0.0, 1.0, 1), DomainError);
  PathOptions o;
  o.record_every = 0;
  EXPECT_THROW((void)em_path(m, 1.0, 0.01, 1.0, 1, o), DomainError);
  EXPECT_THROW((void)hyperbolic_sde_model(0.0, 0.1), DomainError);
  EXPECT_THROW((void)gbm_model(0.1, 1.0, -1.0), DomainError);
}

TEST(Gbm, TimeAverageExponentIsItoCorrected) {
  EXPECT_DOUBLE_EQ(gbm_time_average_exponent(0.05, 1.0, 0.1), 0.045);
  EXPECT_DOUBLE_EQ(gbm_time_average_exponent(0.01, 5.0, 0.02), 0.05 - 0.005);
}

TEST(Gbm, PathwiseSlopeConvergesToTimeAverage) {
  // The slope of ln A has standard deviation about sigma*sqrt(12/T^3)*T/2,
  // small for T = 2000; average over a few seeds.
  double sum = 0.0;
  const int n = 8;
  for (int i = 0; i < n; ++i) {
    const PathResult p = em_path(gbm_model(0.05, 1.0, 0.1), 1.0, 0.01, 2000.0,
                                 path_seed(42, i));
    sum += pathwise_growth_slope(p);
  }
  EXPECT_NEAR(sum / n, 0.045, 0.003);
}

TEST(Ergodicity, HyperbolicSdeDriftOfU) {
  const double k = 0.05, sigma = 0.05;
  const auto grid = integer_grid(1, 100);
  const ErgodicityReport r = ergodicity_check(hyperbolic_sde_model(k, sigma), grid);
  ASSERT_EQ(r.drift_of_u.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = (k - sigma * sigma * grid[i]) / sigma;
    const double scale = std::abs(k / sigma) + sigma * grid[i];
    EXPECT_NEAR(r.drift_of_u[i], exact, 1e-8 * scale) << "A=" << grid[i];
    EXPECT_NEAR(r.term_scale[i], scale, 1e-8 * scale);
  }
  EXPECT_FALSE(r.transform_exists);
  EXPECT_FALSE(r.approximate);
  EXPECT_EQ(r.reason, "drift of u depends on A");
}

TEST(Ergodicity, GbmHasConstantDrift) {
  const double k = 0.05, I = 2.0, sigma = 0.1;
  const ErgodicityReport r =
      ergodicity_check(gbm_model(k, I, sigma), integer_grid(1, 100));
  EXPECT_TRUE(r.transform_exists);
  EXPECT_NEAR(r.mean_drift, k / sigma - sigma * I / 2.0, 1e-8);
  EXPECT_LT(r.constancy_score, 1e-6);
}

TEST(Ergodicity, ConstructedDriftAdmitsTransformation) {
  const std::function<double(double)> b = [](double A) { return 0.3 * A * A; };
  const StochasticModel m{ergodic_drift(b, 0.7, 1.0), b};
  const ErgodicityReport r = ergodicity_check(m, integer_grid(1, 50));
  EXPECT_TRUE(r.transform_exists) << r.constancy_score;
  EXPECT_NEAR(r.mean_drift, 0.7, 1e-6);
}

TEST(Ergodicity, DegenerateInputs) {
  const auto m = gbm_model(0.05, 1.0, 0.1);
  const std::vector<double> short_grid{1.0, 2.0};
  EXPECT_THROW((void)ergodicity_check(m, short_grid), DomainError);
  const std::vector<double> bad{1.0, -2.0, 3.0};
  EXPECT_THROW((void)ergodicity_check(m, bad), DomainError);

  const StochasticModel flat{[](double A) { return A; }, [](double) { return 0.0; }};
  const ErgodicityReport r = ergodicity_check(flat, integer_grid(1, 5));
  EXPECT_FALSE(r.transform_exists);
  EXPECT_NE(r.reason.find("diffusion vanishes"), std::string::npos);
}
