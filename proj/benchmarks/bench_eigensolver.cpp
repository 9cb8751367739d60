#include <benchmark/benchmark.h>

#include "freeconv/ensemble.hpp"
#include "freeconv/spectra.hpp"

namespace {

using namespace freeconv;

void BM_WignerEigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const HermitianMatrix m = sample_wigner(n, EntryDist{EntryLaw::gaussian, 1.0}, 42);
    for (auto _ : state) {
        auto eigs = eigenvalues_descending(m);
        benchmark::DoNotOptimize(eigs);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_WignerEigenvalues)->Arg(128)->Arg(256)->Arg(512)->Arg(1024)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

void BM_SampleWigner(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto w = sample_wigner(n, EntryDist{EntryLaw::gaussian, 1.0}, seed++);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_SampleWigner)->Arg(512)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace
