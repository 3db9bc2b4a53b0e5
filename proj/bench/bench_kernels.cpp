// Serial reference loops vs their OpenMP counterparts. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "mltsk/kernels.hpp"

namespace k = mltsk::kernels;
using k::Matrix;

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    return Matrix::NullaryExpr(rows, cols, [&] { return dist(gen); });
}

Matrix binary(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution coin(0.3);
    return Matrix::NullaryExpr(rows, cols, [&] { return coin(gen) ? 1.0 : 0.0; });
}

// Emotions-sized inputs: 72 features, N instances, 5 rules.
template <void (*Kernel)(const Matrix&, const Matrix&, const Matrix&, Matrix&)>
void fuzzy_map(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix x = uniform(72, n, -2, 2, 1);
    const Matrix c = uniform(5, 72, -1, 1, 2);
    const Matrix w = uniform(5, 72, 0.5, 2, 3);
    Matrix g;
    for (auto _ : state) {
        Kernel(x, c, w, g);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

template <void (*Kernel)(const Matrix&, const Matrix&, double, Matrix&)>
void fcm_memberships(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix x = uniform(72, n, -2, 2, 4);
    const Matrix c = uniform(5, 72, -1, 1, 5);
    Matrix u;
    for (auto _ : state) {
        Kernel(x, c, 2.0, u);
        benchmark::DoNotOptimize(u.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

template <void (*Kernel)(const Matrix&, const Matrix&, k::InstanceMetrics&)>
void instance_metrics(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix s = uniform(20, n, 0, 1, 6);
    const Matrix y = binary(20, n, 7);
    k::InstanceMetrics out;
    for (auto _ : state) {
        Kernel(s, y, out);
        benchmark::DoNotOptimize(out.ap.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(fuzzy_map<k::serial::fuzzy_map>)->Name("fuzzy_map/serial")->Arg(593)->Arg(8192);
BENCHMARK(fuzzy_map<k::omp::fuzzy_map>)->Name("fuzzy_map/omp")->Arg(593)->Arg(8192);
BENCHMARK(fcm_memberships<k::serial::fcm_memberships>)->Name("fcm_memberships/serial")->Arg(593)->Arg(8192);
BENCHMARK(fcm_memberships<k::omp::fcm_memberships>)->Name("fcm_memberships/omp")->Arg(593)->Arg(8192);
BENCHMARK(instance_metrics<k::serial::instance_metrics>)->Name("instance_metrics/serial")->Arg(593)->Arg(8192);
BENCHMARK(instance_metrics<k::omp::instance_metrics>)->Name("instance_metrics/omp")->Arg(593)->Arg(8192);

BENCHMARK_MAIN();
