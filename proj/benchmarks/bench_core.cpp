#include <benchmark/benchmark.h>

#include <cmath>

#include "fnls/eigensolver.hpp"
#include "fnls/grid.hpp"
#include "fnls/scalar.hpp"
#include "fnls/solver.hpp"

using namespace fnls;

namespace {

GridFunction bump(const Grid& g) {
    return sample(g, [](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return std::exp(-0.5 * r2);
    });
}

void BM_Laplacian1d(benchmark::State& state) {
    const Grid g = Grid::make(1, 40.0, static_cast<int>(state.range(0)));
    const GridFunction f = bump(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(laplacian_apply(f));
    }
}
BENCHMARK(BM_Laplacian1d)->Arg(512)->Arg(2048)->Arg(8192);

void BM_Laplacian2d(benchmark::State& state) {
    const Grid g = Grid::make(2, 40.0, static_cast<int>(state.range(0)));
    const GridFunction f = bump(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(laplacian_apply(f));
    }
}
BENCHMARK(BM_Laplacian2d)->Arg(64)->Arg(128)->Arg(256);

void BM_Energy(benchmark::State& state) {
    const Grid g = Grid::make(1, 40.0, 1024);
    OrbitalSet os;
    const int n = static_cast<int>(state.range(0));
    for (int j = 0; j < n; ++j) {
        GridFunction u = random_smooth_field(g, 2.0, 17 + j);
        const double nn = std::sqrt(norm2(u));
        for (double& v : u.values()) v /= nn;
        os.orbitals.push_back(std::move(u));
        os.occupations.push_back(1.0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(energy(os, 1.3));
    }
}
BENCHMARK(BM_Energy)->Arg(2)->Arg(8)->Arg(15);

void BM_ScalarSolve1d(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_scalar(1, 1.3));
    }
}
BENCHMARK(BM_ScalarSolve1d)->Unit(benchmark::kMillisecond);

void BM_LowestEigenpairs(benchmark::State& state) {
    const Grid g = Grid::make(1, 30.0, 512);
    GridFunction rho = sample(g, [](const std::array<double, 3>& x) {
        return 2.0 * std::exp(-0.1 * x[0] * x[0]);
    });
    for (auto _ : state) {
        benchmark::DoNotOptimize(lowest_eigenpairs(rho, 1.5, 4));
    }
}
BENCHMARK(BM_LowestEigenpairs)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
