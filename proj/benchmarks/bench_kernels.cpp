#include <benchmark/benchmark.h>

#include <random>

#include <pfim/linalg.hpp>

namespace {

pfim::Matrix random_matrix(int n, double norm1) {
    std::mt19937 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    pfim::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return a * (norm1 / a.cwiseAbs().colwise().sum().maxCoeff());
}

void BM_mat_exp(benchmark::State& state) {
    const pfim::Matrix a = random_matrix(static_cast<int>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(pfim::mat_exp(a));
}
BENCHMARK(BM_mat_exp)->Arg(2)->Arg(6)->Arg(36);

void BM_phi1(benchmark::State& state) {
    const pfim::Matrix a = random_matrix(static_cast<int>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(pfim::phi1(a, 0.01));
}
BENCHMARK(BM_phi1)->Arg(2)->Arg(6)->Arg(36);

void BM_eigenvalues(benchmark::State& state) {
    const pfim::Matrix a = random_matrix(static_cast<int>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(pfim::eigenvalues(a));
}
BENCHMARK(BM_eigenvalues)->Arg(2)->Arg(6)->Arg(36);

void BM_solve_dense(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const pfim::Matrix a = random_matrix(n, 2.0) + pfim::Matrix::Identity(n, n);
    const pfim::Vector b = pfim::Vector::Ones(n);
    for (auto _ : state) benchmark::DoNotOptimize(pfim::solve_dense(a, b));
}
BENCHMARK(BM_solve_dense)->Arg(3)->Arg(37);

}  // namespace
