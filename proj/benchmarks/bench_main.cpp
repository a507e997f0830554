#include <benchmark/benchmark.h>

#include <random>

#include "sigmak/bubbles.hpp"
#include "sigmak/conformal.hpp"
#include "sigmak/continuation.hpp"
#include "sigmak/radial.hpp"
#include "sigmak/symfun.hpp"

using namespace sigmak;

static void BM_Sigma(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> l(static_cast<std::size_t>(n));
    for (auto& v : l) v = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(sigma(l, n / 2 + 1));
}
BENCHMARK(BM_Sigma)->Arg(3)->Arg(6)->Arg(12);

static void BM_SchoutenSpectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto u = bubble_field(BubbleSpec(n, 2, 1.5));
    Vector x = Vector::LinSpaced(n, -0.5, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(schouten_flat(u.jet(x))));
}
BENCHMARK(BM_SchoutenSpectrum)->Arg(3)->Arg(6);

static void BM_Shoot(benchmark::State& state) {
    const int n = 4, k = static_cast<int>(state.range(0));
    const double u0 = c_constant(n, k);
    for (auto _ : state) benchmark::DoNotOptimize(shoot(u0, n, k, 10.0));
}
BENCHMARK(BM_Shoot)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ContinuePath(benchmark::State& state) {
    BvpSpec s;
    s.n = 3;
    s.k = 3;
    s.m = static_cast<int>(state.range(0));
    s.R_b = 5.0;
    s.u_b = bubble_profile(3, c_constant(3, 3), 1.0, s.R_b).f;
    s.t_path = uniform_t_path(11);
    for (auto _ : state) benchmark::DoNotOptimize(continue_path(s));
}
BENCHMARK(BM_ContinuePath)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
