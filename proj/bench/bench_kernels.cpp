// Serial reference kernels against their OpenMP versions, and exact against
// truncated DSD. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "dsd/kernels.hpp"
#include "dsd/metrics.hpp"
#include "dsd/rng.hpp"
#include "dsd/spectral.hpp"
#include "dsd/synth.hpp"

using namespace dsd;

namespace {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

WeightedGraph block_graph(int n) {
    SbmSpec spec;
    spec.block_sizes = std::vector<int>(4, n / 4);
    spec.prob = Matrix::Constant(4, 4, 0.002);
    spec.prob.diagonal().setConstant(0.02);
    spec.seed = 7;
    return gen_hsbm(spec).graph;
}

void BM_PairwiseSerial(benchmark::State& state) {
    const Matrix x = gaussian_matrix(50, static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::pairwise_distances(x));
}
void BM_PairwiseParallel(benchmark::State& state) {
    const Matrix x = gaussian_matrix(50, static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::pairwise_distances(x));
}

void BM_SpmmSerial(benchmark::State& state) {
    const auto g = block_graph(static_cast<int>(state.range(0)));
    const Matrix x = gaussian_matrix(g.n(), 32, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::spmm(g.weights(), x));
}
void BM_SpmmParallel(benchmark::State& state) {
    const auto g = block_graph(static_cast<int>(state.range(0)));
    const Matrix x = gaussian_matrix(g.n(), 32, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::spmm(g.weights(), x));
}

void BM_ResidualCurveSerial(benchmark::State& state) {
    const auto op = diffusion_operator(block_graph(static_cast<int>(state.range(0))));
    const Matrix p = op.dense_p();
    const Matrix target = Vector::Ones(op.n()) * op.pi.transpose();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::power_residual_curve(p, target, 20));
}
void BM_ResidualCurveParallel(benchmark::State& state) {
    const auto op = diffusion_operator(block_graph(static_cast<int>(state.range(0))));
    const Matrix p = op.dense_p();
    const Matrix target = Vector::Ones(op.n()) * op.pi.transpose();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::power_residual_curve(p, target, 20));
}

void BM_DsdExact(benchmark::State& state) {
    const auto op = diffusion_operator(block_graph(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(dsd_exact(op));
}
void BM_DsdApprox50(benchmark::State& state) {
    const auto op = diffusion_operator(block_graph(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(dsd_truncated(dsd_embedding(eig_topk(op, 50))));
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpmmSerial)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpmmParallel)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualCurveSerial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualCurveParallel)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DsdExact)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DsdApprox50)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
