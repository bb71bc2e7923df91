#include <benchmark/benchmark.h>

#include <vector>

#include "blowup/model.hpp"
#include "blowup/ode.hpp"

using namespace blowup;

static void BM_IntegrateExponential(benchmark::State& state) {
  const VectorField f = VectorField::scalar(laws::exponential(0.00462, 100.0));
  const std::vector<double> y0{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(f, y0, 10.0).size());
  }
}
BENCHMARK(BM_IntegrateExponential);

static void BM_BlowUpHyperbolic(benchmark::State& state) {
  const VectorField f = VectorField::scalar(laws::hyperbolic(0.01));
  const std::vector<double> y0{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_blowup_time(f, y0).event->estimate);
  }
}
BENCHMARK(BM_BlowUpHyperbolic);

static void BM_BlowUpCoupled(benchmark::State& state) {
  const std::vector<double> coeffs{0.05, 0.1};
  const VectorField f = multiplicative_field(coeffs);
  const std::vector<double> y0{0.5, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_blowup_time(f, y0).event->estimate);
  }
}
BENCHMARK(BM_BlowUpCoupled);
