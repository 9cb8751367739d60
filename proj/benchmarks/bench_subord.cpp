#include <benchmark/benchmark.h>

#include "freeconv/subord.hpp"

namespace {

using namespace freeconv;

const Measure& mixed_measure() {
    static const Measure nu({Atom{-1.5, 0.2}, UniformPiece{-1.0, 1.0, 0.55}, Atom{2.0, 0.25}});
    return nu;
}

void BM_ModelConstruction(benchmark::State& state) {
    for (auto _ : state) {
        FreeConvolution model(mixed_measure(), 0.8, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_ModelConstruction)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Density(benchmark::State& state) {
    const FreeConvolution model(mixed_measure(), 0.8);
    const double lo = model.support().front().lo;
    const double hi = model.support().back().hi;
    double x = lo;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.density(x));
        x += 0.01 * (hi - lo);
        if (x > hi) x = lo;
    }
}
BENCHMARK(BM_Density);

void BM_Cdf(benchmark::State& state) {
    const FreeConvolution model(mixed_measure(), 0.8);
    const double lo = model.support().front().lo;
    const double hi = model.support().back().hi;
    double x = lo;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.cdf(x));
        x += 0.013 * (hi - lo);
        if (x > hi) x = lo;
    }
}
BENCHMARK(BM_Cdf);

void BM_FixedPointOracle(benchmark::State& state) {
    const FreeConvolution model(mixed_measure(), 0.8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.stieltjes_fixed_point({0.3, 1e-4}));
    }
}
BENCHMARK(BM_FixedPointOracle);

} // namespace
