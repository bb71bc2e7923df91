#include <benchmark/benchmark.h>

#include <vector>

#include "blowup/dsl.hpp"

using namespace blowup;

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsl::parse_system("dY = k1*Y*A; dA = k2*Y*A*(1 + ln(A))"));
  }
}
BENCHMARK(BM_Parse);

static void BM_TreeWalk(benchmark::State& state) {
  const auto e = dsl::parse_expression("k*A^2 + ln(A)*A");
  const dsl::Bindings b{{"k", 0.05}, {"A", 3.0}};
  for (auto _ : state) benchmark::DoNotOptimize(dsl::evaluate(*e, b));
}
BENCHMARK(BM_TreeWalk);

static void BM_CompiledField(benchmark::State& state) {
  dsl::SystemSpec s = dsl::parse_system("dA = k*A^2 + ln(A)*A");
  s.parameters = {{"k", 0.05}};
  const VectorField f = dsl::to_field(s);
  const std::vector<double> y{3.0};
  std::vector<double> out(1);
  for (auto _ : state) {
    f(y, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(BM_CompiledField);
