#include <benchmark/benchmark.h>

#include <pfim/benchmarks.hpp>
#include <pfim/pfim.hpp>
#include <pfim/study.hpp>

namespace {

// One full solve per grid size; the complexity fit should come out linear.
void BM_pfim_duffing(benchmark::State& state) {
    const int n_p = static_cast<int>(state.range(0));
    const pfim::Benchmark b = pfim::make_benchmark("duffing");
    const pfim::PeriodicTrajectory guess = pfim::default_guess(b, n_p);
    pfim::PfimConfig cfg;
    cfg.intervals = n_p;
    cfg.record_history = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pfim::pfim_solve(b.system, guess, pfim::PhaseKind::forced, cfg));
    }
    state.SetComplexityN(n_p);
}
BENCHMARK(BM_pfim_duffing)->RangeMultiplier(2)->Range(256, 8192)->Complexity(benchmark::oN)
    ->Unit(benchmark::kMillisecond);

void BM_interval_operators(benchmark::State& state) {
    const int n_p = static_cast<int>(state.range(0));
    const pfim::Benchmark b = pfim::make_benchmark("vanderpol");
    const pfim::Linearization lin = pfim::build_linearization(b.system, pfim::default_guess(b, n_p));
    for (auto _ : state) benchmark::DoNotOptimize(pfim::build_interval_operators(lin));
    state.SetComplexityN(n_p);
}
BENCHMARK(BM_interval_operators)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN)
    ->Unit(benchmark::kMillisecond);

}  // namespace
