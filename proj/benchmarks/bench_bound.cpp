#include <benchmark/benchmark.h>

#include <cmath>

#include "snc/bound.hpp"
#include "snc/service_models.hpp"
#include "snc/simulator.hpp"

using namespace snc;

namespace {
constexpr double kLn2 = 0.6931471805599453;
const SlotSpec kSlot = SlotSpec::make(168, 1e-3);
const ArrivalSpec kArrival{24.0 * kLn2};
}  // namespace

static void MellinEvalTricomi(benchmark::State& state) {
    const auto mel =
        mellin_mrt_tricomi(ChannelParams::perfect_csi(static_cast<int>(state.range(0)), 3.16));
    double s = -12.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mel(s));
        s = s < 1.0 ? s + 0.1 : -12.0;
    }
}
BENCHMARK(MellinEvalTricomi)->Arg(1)->Arg(3)->Arg(8);

static void MellinEvalSum(benchmark::State& state) {
    const auto mel =
        mellin_mrt_sum(ChannelParams::perfect_csi(static_cast<int>(state.range(0)), 3.16));
    double s = -12.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mel(s));
        s = s < 1.0 ? s + 0.1 : -12.0;
    }
}
BENCHMARK(MellinEvalSum)->Arg(1)->Arg(3)->Arg(8);

static void MellinEvalFiniteBlocklength(benchmark::State& state) {
    const auto mel = mellin_fb(ChannelParams::perfect_csi(2, 3.16),
                               FiniteBlocklengthSpec::make(168, 1e-3));
    double s = -12.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mel(s));
        s = s < 1.0 ? s + 0.1 : -12.0;
    }
}
BENCHMARK(MellinEvalFiniteBlocklength);

static void DelayBoundFullSearch(benchmark::State& state) {
    const auto mel =
        mellin_mrt_tricomi(ChannelParams::perfect_csi(static_cast<int>(state.range(0)), 3.16));
    for (auto _ : state) {
        benchmark::DoNotOptimize(delay_bound(mel, kArrival, kSlot, 3));
    }
}
BENCHMARK(DelayBoundFullSearch)->Arg(1)->Arg(2)->Arg(3);

static void SimulatorThroughput(benchmark::State& state) {
    sim::SimConfig cfg;
    cfg.scheme.kind = SchemeKind::MrtExact;
    cfg.scheme.params = ChannelParams::perfect_csi(2, 1.0);
    cfg.arrival = kArrival;
    cfg.slot = kSlot;
    cfg.horizon_slots = state.range(0);
    cfg.warmup_slots = state.range(0) / 10;
    cfg.seed = 1;
    cfg.w_grid = {1, 2, 4, 8};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::run(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(SimulatorThroughput)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
