#include <benchmark/benchmark.h>

#include "esir/elliptical.hpp"
#include "esir/kendall.hpp"
#include "esir/linalg.hpp"
#include "esir/sdr.hpp"
#include "esir/sim.hpp"

using namespace esir;

namespace {

linalg::Matrix sample(int n, int p, std::uint64_t seed) {
    Rng rng(seed);
    const elliptical::EllipticalSpec spec(linalg::Vector::Zero(p), linalg::SymMatrix::identity(p),
                                          elliptical::StudentT{3.0});
    return elliptical::sample_elliptical(spec, n, rng);
}

void BM_KendallTau(benchmark::State& state) {
    const auto x = sample(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(kendall::kendall_tau(x));
}
BENCHMARK(BM_KendallTau)->Args({400, 10})->Args({1600, 10})->Args({400, 30})->Unit(benchmark::kMillisecond);

void BM_EsirFit(benchmark::State& state) {
    const auto model = sim::make_model(sim::ModelId::B1, static_cast<int>(state.range(1)), "cauchy");
    Rng rng(2);
    const auto d = sim::gen_dataset(model, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(sdr::esir_fit(d, 10, 2));
}
BENCHMARK(BM_EsirFit)->Args({400, 10})->Args({400, 30})->Unit(benchmark::kMillisecond);

void BM_SirFit(benchmark::State& state) {
    const auto model = sim::make_model(sim::ModelId::B1, static_cast<int>(state.range(1)), "cauchy");
    Rng rng(2);
    const auto d = sim::gen_dataset(model, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(sdr::sir_fit(d, 10, 2));
}
BENCHMARK(BM_SirFit)->Args({400, 10})->Args({400, 30})->Unit(benchmark::kMicrosecond);

void BM_SymEig(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto x = sample(4 * p, p, 3);
    const auto a = linalg::SymMatrix::symmetrize(x.transpose() * x);
    for (auto _ : state) benchmark::DoNotOptimize(linalg::sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(10)->Arg(30)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
