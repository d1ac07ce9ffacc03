#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "ggmc/cluster.hpp"
#include "ggmc/distance.hpp"
#include "ggmc/pcor.hpp"

using namespace ggmc;

namespace {

std::shared_ptr<const DataMatrix> make_data(Index m, Index n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  Matrix raw(m, n);
  for (Index i = 0; i < raw.size(); ++i) raw.data()[i] = g(rng);
  return std::make_shared<const DataMatrix>(standardize(std::move(raw)));
}

void BM_BuildFactors(benchmark::State& state) {
  const auto data = make_data(state.range(0), state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_factors(data, Regularization::truncated_svd(0.3)));
}
BENCHMARK(BM_BuildFactors)->Args({200, 5000})->Args({500, 20000})->Unit(benchmark::kMillisecond);

void BM_PcorColumn(benchmark::State& state) {
  const auto data = make_data(200, state.range(0));
  const FactorModel f = build_factors(data, Regularization::truncated_svd(0.3));
  const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcor_column(f, scal, i));
    i = (i + 1) % f.variables();
  }
}
BENCHMARK(BM_PcorColumn)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_PdistPair(benchmark::State& state) {
  const auto data = make_data(200, 5000);
  const FactorModel f = build_factors(data, Regularization::truncated_svd(0.3));
  const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdist_pair(f, scal, i, (i * 7 + 3) % 5000));
    i = (i + 1) % 5000;
  }
}
BENCHMARK(BM_PdistPair)->Unit(benchmark::kMicrosecond);

void BM_AssignLabels(benchmark::State& state) {
  const auto data = make_data(300, state.range(0));
  const FactorModel f = build_factors(data, Regularization::truncated_svd(0.3));
  const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
  const int k = static_cast<int>(state.range(1));
  const Matrix centers = update_centers(f, scal, init_labels(f.variables(), k, 1), k);
  for (auto _ : state) benchmark::DoNotOptimize(assign_labels(f, scal, centers));
}
BENCHMARK(BM_AssignLabels)->Args({10000, 20})->Args({50000, 100})->Unit(benchmark::kMillisecond);

void BM_KMeansImplicit(benchmark::State& state) {
  const auto data = make_data(300, state.range(0));
  const FactorModel f = build_factors(data, Regularization::truncated_svd(0.3));
  const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
  KMeansConfig cfg;
  cfg.k = 20;
  cfg.max_iters = 10;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_implicit(f, scal, cfg));
}
BENCHMARK(BM_KMeansImplicit)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
