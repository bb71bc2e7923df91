#include <benchmark/benchmark.h>

#include "blowup/classifier.hpp"

using namespace blowup;

static void BM_ClassifyPower(benchmark::State& state) {
  const GrowthLaw law = laws::power(1.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_growth_law(law).verdict);
  }
}
BENCHMARK(BM_ClassifyPower)->Unit(benchmark::kMicrosecond);

static void BM_ClassifyLogPower(benchmark::State& state) {
  const GrowthLaw law = laws::log_power(1.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_growth_law(law).verdict);
  }
}
BENCHMARK(BM_ClassifyLogPower)->Unit(benchmark::kMicrosecond);
