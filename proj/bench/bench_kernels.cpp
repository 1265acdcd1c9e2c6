// Parallel kernels against their serial references. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "tlr/reference.hpp"
#include "tlr/tlr.hpp"

namespace {

tlr::Matrix random_rows(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  tlr::Matrix x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

tlr::Labels cyclic_labels(Eigen::Index n, int classes) {
  tlr::Labels y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<tlr::Label>(i % classes);
  return y;
}

void BM_Gram(benchmark::State& state) {
  const auto n = state.range(0);
  const auto x = random_rows(n, 64, 1);
  const auto spec = tlr::KernelSpec::rbf(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::gram(x, x, spec));
  state.SetComplexityN(n);
}

void BM_GramReference(benchmark::State& state) {
  const auto n = state.range(0);
  const auto x = random_rows(n, 64, 1);
  const auto spec = tlr::KernelSpec::rbf(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::reference::gram(x, x, spec));
  state.SetComplexityN(n);
}

void BM_Knn1(benchmark::State& state) {
  const auto n = state.range(0);
  const auto train = random_rows(n, 32, 2);
  const auto test = random_rows(n, 32, 3);
  const auto y = cyclic_labels(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::knn1_predict(train, y, test));
}

void BM_Knn1Reference(benchmark::State& state) {
  const auto n = state.range(0);
  const auto train = random_rows(n, 32, 2);
  const auto test = random_rows(n, 32, 3);
  const auto y = cyclic_labels(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::reference::knn1(train, y, test));
}

void BM_MedianBandwidth(benchmark::State& state) {
  const auto s = random_rows(state.range(0), 16, 4);
  const auto t = random_rows(state.range(0), 16, 5);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::median_bandwidth(s, t));
}

void BM_MedianBandwidthReference(benchmark::State& state) {
  const auto s = random_rows(state.range(0), 16, 4);
  const auto t = random_rows(state.range(0), 16, 5);
  for (auto _ : state) benchmark::DoNotOptimize(tlr::reference::median_bandwidth(s, t));
}

void BM_GridSearch(benchmark::State& state) {
  tlr::ShiftSpec spec;
  spec.n_per_class = 50;
  const auto pair = tlr::synth_shift_pair(spec, 42);
  tlr::GridSpec grid;
  grid.alphas = {1e-4, 1e-2, 1.0};
  grid.betas = {1e-4, 1e-2, 1.0};
  grid.ks = {10, 20, 40};
  tlr::ProtocolOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlr::grid_search(pair, grid, tlr::KernelSpec::linear(), options));
  }
}

}  // namespace

BENCHMARK(BM_Gram)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramReference)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Knn1)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Knn1Reference)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianBandwidth)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianBandwidthReference)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSearch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
