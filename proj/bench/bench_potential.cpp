// Parallel potential kernel against the serial direct-sum reference.
//   ./bench_potential --benchmark_filter=Potential

#include "rotstar/gravity.hpp"

#include <benchmark/benchmark.h>

namespace {

rotstar::DensityField ball(std::size_t n) {
    return rotstar::uniform_ball(rotstar::AxisymGrid(n, n, 2.0, 2.0), 1.0, 1.0, 8);
}

void BM_Potential(benchmark::State& state) {
    const auto rho = ball(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(rotstar::potential(rho, 16));
    state.SetComplexityN(state.range(0) * state.range(0));
}

void BM_PotentialReference(benchmark::State& state) {
    const auto rho = ball(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(rotstar::potential_reference(rho, 16));
    state.SetComplexityN(state.range(0) * state.range(0));
}

} // namespace

BENCHMARK(BM_Potential)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PotentialReference)->RangeMultiplier(2)->Range(32, 64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
