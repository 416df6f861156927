#include <benchmark/benchmark.h>

#include "mixed_hk/batch.hpp"
#include "mixed_hk/profile.hpp"
#include "mixed_hk/rng.hpp"
#include "mixed_hk/scenarios.hpp"
#include "mixed_hk/spectral.hpp"

using namespace mixed_hk;

namespace {

Graph random_graph(std::size_t n) {
    CounterRng rng(n);
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.4) g.add_edge(i, j);
    return g;
}

void BM_Cheeger(benchmark::State& state) {
    const Graph g = random_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cheeger_constant(g));
}

void BM_CheegerSerial(benchmark::State& state) {
    const Graph g = random_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cheeger_constant_serial(g));
}

void BM_Batch(benchmark::State& state) {
    const ModelConfig c = builtin_scenario("sync-hk").config;
    for (auto _ : state) benchmark::DoNotOptimize(batch_run(c, static_cast<std::size_t>(state.range(0)), 1));
}

void BM_BatchSerial(benchmark::State& state) {
    const ModelConfig c = builtin_scenario("sync-hk").config;
    for (auto _ : state) benchmark::DoNotOptimize(batch_run_serial(c, static_cast<std::size_t>(state.range(0)), 1));
}

}  // namespace

BENCHMARK(BM_Cheeger)->Arg(10)->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheegerSerial)->Arg(10)->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Batch)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
