// Serial reference sweep against the OpenMP kernel.

#include "hsim/spec_io.hpp"
#include "hsim/spectral.hpp"

#include <benchmark/benchmark.h>

#include <string>

namespace {

using namespace hsim;

const char* const kSpecs[] = {"fig1a", "ten_spheres_90mK"};

HybridSystem load(std::int64_t which) {
    return build_system(load_spec(std::string(HSIM_SPEC_DIR) + "/" + kSpecs[which] + ".spec"));
}

template <SpectrumMap (*Kernel)(const HybridSystem&, const SweepGrid&, const Channel&)>
void run(benchmark::State& state) {
    const HybridSystem sys = load(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const SweepGrid grid = make_grid(linspace(0.36, 0.40, n), linspace(10.2, 11.1, 4 * n));
    for (auto _ : state) {
        SpectrumMap map = Kernel(sys, grid, Channel::total());
        benchmark::DoNotOptimize(map.power.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * 4 * n));
    state.SetLabel(kSpecs[state.range(0)]);
}

void BM_SweepSerial(benchmark::State& state) { run<sweep_serial>(state); }
void BM_SweepParallel(benchmark::State& state) { run<sweep>(state); }

BENCHMARK(BM_SweepSerial)->ArgsProduct({{0, 1}, {50, 200}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->ArgsProduct({{0, 1}, {50, 200}})->Unit(benchmark::kMillisecond)->UseRealTime();

} // namespace

BENCHMARK_MAIN();
