#include <benchmark/benchmark.h>

#include "dicke/detection_fit.hpp"
#include "dicke/sideband_sim.hpp"

namespace {

using namespace dicke;

SweepTemplate four_qubits() {
    SweepTemplate s;
    s.n_qubits = 4;
    return s;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto grid = mass_ratio_grid(0.1, 10.0, static_cast<int>(state.range(0)), true);
    for (auto _ : state) benchmark::DoNotOptimize(fidelity_vs_mass_ratio_serial(four_qubits(), grid, 2));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto grid = mass_ratio_grid(0.1, 10.0, static_cast<int>(state.range(0)), true);
    for (auto _ : state) benchmark::DoNotOptimize(fidelity_vs_mass_ratio(four_qubits(), grid, 2));
}

struct BootstrapInput {
    CompositeDists dists = composite_dists(ReadoutModel{});
    Histogram hist = histogram_of(synthesize_shots({0.08, 0.80, 0.12}, dists, 10000, 1));
};

void BM_BootstrapSerial(benchmark::State& state) {
    const BootstrapInput in;
    FitOptions o;
    o.bootstrap = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_populations_serial(in.hist, in.dists, o));
}

void BM_BootstrapParallel(benchmark::State& state) {
    const BootstrapInput in;
    FitOptions o;
    o.bootstrap = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_populations(in.hist, in.dists, o));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapSerial)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapParallel)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
