#include <benchmark/benchmark.h>

#include "mcswarm/channel.hpp"
#include "mcswarm/grid_map.hpp"
#include "mcswarm/sim.hpp"

using namespace mcswarm;

static void BM_Pdr(benchmark::State& state) {
    ChannelParams params{0.5, 0.95, 0.5};
    double d = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pdr(d, params));
        d += 0.01;
        if (d > 8.0) d = 0.0;
    }
}
BENCHMARK(BM_Pdr);

static void BM_FrontierField(benchmark::State& state) {
    GridMap map(60, 60);
    // Half-explored map with a few obstacles.
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 60; ++x) map.update({x, y}, CellState::Clear);
    for (int x = 10; x < 20; ++x) map.update({x, 15}, CellState::Occupied);
    for (auto _ : state) benchmark::DoNotOptimize(frontier_field(map));
}
BENCHMARK(BM_FrontierField);

static void BM_SimSlot(benchmark::State& state) {
    SimConfig cfg;
    cfg.arena_seed = 7;
    cfg.horizon_slots = 0;
    Arena arena = generate_arena(cfg.arena_seed, cfg.arena);
    Simulation sim(cfg, std::move(arena));
    for (auto _ : state) sim.step();
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimSlot);

BENCHMARK_MAIN();
