#include <benchmark/benchmark.h>

#include "ilw/evolve.hpp"
#include "ilw/functionals.hpp"
#include "ilw/linops.hpp"
#include "ilw/soliton.hpp"

using namespace ilw;

static void BM_ApplyK(benchmark::State& state) {
  const Grid g = Grid::make(static_cast<int>(state.range(0)), 100.0);
  const Field u = sample_soliton(make_soliton(1.0, 1.0), g);
  for (auto _ : state) benchmark::DoNotOptimize(tilbert_dx(u, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyK)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNLogN);

static void BM_GradH3(benchmark::State& state) {
  const Grid g = Grid::make(static_cast<int>(state.range(0)), 100.0);
  const Field u = sample_soliton(make_soliton(1.0, 1.0), g);
  for (auto _ : state) benchmark::DoNotOptimize(grad_H(3, u, 1.0));
}
BENCHMARK(BM_GradH3)->Arg(1024)->Arg(2048);

static void BM_StepIFRK4(benchmark::State& state) {
  const Grid g = Grid::make(static_cast<int>(state.range(0)), 100.0);
  Stepper s(g, 1.0, 1e-3);
  s.set_state(sample_soliton(make_soliton(1.0, 1.0), g));
  for (auto _ : state) s.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepIFRK4)->RangeMultiplier(2)->Range(256, 2048);

static void BM_AssembleL1(benchmark::State& state) {
  const Grid g = Grid::make(static_cast<int>(state.range(0)), 60.0);
  const Field q = sample_soliton(make_soliton(1.0, 1.0), g);
  ComboParams cp;
  cp.speeds = {1.0};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_combo(ComboKind::L1, q, cp));
}
BENCHMARK(BM_AssembleL1)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_EigenvaluesL1(benchmark::State& state) {
  const Grid g = Grid::make(static_cast<int>(state.range(0)), 60.0);
  const Field q = sample_soliton(make_soliton(1.0, 1.0), g);
  ComboParams cp;
  cp.speeds = {1.0};
  const SecondVariation A = assemble_combo(ComboKind::L1, q, cp);
  for (auto _ : state) benchmark::DoNotOptimize(eig_inertia(A, 1e-8, false));
}
BENCHMARK(BM_EigenvaluesL1)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_SolveTranscendental(benchmark::State& state) {
  double c = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_transcendental(c, 1.0));
    c = c < 5.0 ? c * 1.01 : 0.1;
  }
}
BENCHMARK(BM_SolveTranscendental);
BENCHMARK_MAIN();
