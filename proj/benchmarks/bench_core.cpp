#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ymwh/chebyshev.hpp"
#include "ymwh/galerkin.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

using namespace ymwh;

namespace {

ChebSeries random_series(std::size_t order, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ChebSeries s(order);
    for (std::size_t n = 0; n <= order; ++n) s.at(n) = u(rng) / static_cast<double>(1 + n * n);
    return s;
}

void BM_NonlinearW(benchmark::State& state)
{
    const auto N = static_cast<std::size_t>(state.range(0));
    const ChebSeries a = random_series(N, 1);
    std::vector<double> out(N + 1);
    for (auto _ : state) {
        nonlinear_w_into(a.coeffs(), out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_NonlinearW)->Arg(10)->Arg(20)->Arg(40)->Arg(80);

void BM_GalerkinRhs(benchmark::State& state)
{
    const auto N = static_cast<std::size_t>(state.range(0));
    const ChebSeries a = random_series(N, 2);
    const ChebSeries ad = random_series(N, 3);
    GalerkinRhs rhs(N, PhysParams(3.5).coupling());
    std::vector<double> out(N + 1);
    for (auto _ : state) {
        rhs(a.coeffs(), ad.coeffs(), out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_GalerkinRhs)->Arg(10)->Arg(20)->Arg(40)->Arg(80);

void BM_PencilStar(benchmark::State& state)
{
    const auto M = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pencil_spectrum(ChebSeries(M + 10), PhysParams(2.5), M, Background::star()));
    }
}
BENCHMARK(BM_PencilStar)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FindStatic(benchmark::State& state)
{
    const PhysParams p(6.5);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(find_static(p, n));
}
BENCHMARK(BM_FindStatic)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
