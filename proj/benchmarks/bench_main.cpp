#include <benchmark/benchmark.h>

#include "levyspde/levyspde.hpp"

namespace {

using namespace levyspde;

void BM_SampleNoise(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto marks = MarkSpace::symmetric(1.0, 0.5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_noise(m, 1.0, 1e-3, marks, seed++));
}
BENCHMARK(BM_SampleNoise)->Arg(4)->Arg(16)->Arg(64);

void BM_SolvePath(benchmark::State& state, const char* id) {
  const auto spec = builtin(id);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.level = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_path(spec.bundle, spec.triple, spec.x0, cfg, seed++));
}
BENCHMARK_CAPTURE(BM_SolvePath, heat, "heat")->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(BM_SolvePath, allen_cahn, "allen_cahn")->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(BM_SolvePath, burgers1d, "burgers1d")->Arg(8)->Arg(32);

void BM_Validate(benchmark::State& state, const char* id) {
  const auto spec = builtin(id);
  AuditOptions o;
  o.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(validate(spec, o));
}
BENCHMARK_CAPTURE(BM_Validate, heat, "heat")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Validate, p_laplacian, "p_laplacian")->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
