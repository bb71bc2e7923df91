#include <benchmark/benchmark.h>

#include "blowup/ensemble.hpp"
#include "blowup/sde.hpp"

using namespace blowup;

static void BM_EmPathGbm(benchmark::State& state) {
  const StochasticModel m = gbm_model(0.05, 1.0, 0.1);
  const double t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(em_path(m, 1.0, 0.01, t_end, 42).values.back());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_EmPathGbm)->Arg(200)->Arg(2000);

static void BM_Ensemble(benchmark::State& state) {
  EnsembleSpec spec;
  spec.model = hyperbolic_sde_model(0.05, 0.05);
  spec.n_paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(spec, {1}).exploded);
  }
}
BENCHMARK(BM_Ensemble)->Arg(100)->Unit(benchmark::kMillisecond);
