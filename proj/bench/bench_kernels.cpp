// Serial reference vs. OpenMP for the batch kernels. Arg 0 = serial, 1 = parallel.

#include <vector>

#include <benchmark/benchmark.h>

#include "cotred/batch.hpp"

namespace {

const cotred::InertiaTensor kBody(3.0, 2.0, 1.0);

cotred::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? cotred::Execution::Serial : cotred::Execution::Parallel;
}

void BM_RigidBodyPhaseSweep(benchmark::State& state) {
  const std::vector<cotred::Vec3> initial = {
      {2.0, 0.3, 0.1}, {2.0, 0.6, 0.4}, {1.5, 0.5, 0.6}, {0.1, 0.3, 2.0},
      {0.3, 0.2, 1.5}, {0.5, 0.4, 1.2}, {1.8, 0.2, 0.5}, {0.2, 0.5, 1.7}};
  cotred::rigidbody::OrbitSearch search;
  search.samples_per_period = 4000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cotred::rigid_body_phase_sweep(initial, kBody, search, mode(state)));
  }
}

void BM_ConnectionAxiomSweep(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cotred::connection_axiom_sweep(kBody, 20000, 5, mode(state)));
  }
}

void BM_AmendedPotentialSweep(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cotred::amended_potential_sweep(kBody, 16, 20000, 9, mode(state)));
  }
}

}  // namespace

BENCHMARK(BM_RigidBodyPhaseSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ConnectionAxiomSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AmendedPotentialSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
