#include <benchmark/benchmark.h>

#include "snc/specfun.hpp"

using namespace snc::specfun;

static void UpperGammaPositive(benchmark::State& state) {
    double a = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_upper_incomplete_gamma(a, 1.6));
        a += 1e-9;
    }
}
BENCHMARK(UpperGammaPositive);

static void UpperGammaNegativeWalk(benchmark::State& state) {
    const double a = -static_cast<double>(state.range(0)) - 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_upper_incomplete_gamma(a, 0.4));
    }
}
BENCHMARK(UpperGammaNegativeWalk)->Arg(8)->Arg(64)->Arg(512);

static void TricomiU(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_tricomi_u(m, m + 0.4, 1.0));
    }
}
BENCHMARK(TricomiU)->Arg(2)->Arg(4)->Arg(10)->Arg(64);

static void GaussianQuantile(benchmark::State& state) {
    double eps = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_q_inv(eps));
        eps += 1e-12;
    }
}
BENCHMARK(GaussianQuantile);

BENCHMARK_MAIN();
