#include <doctest.h>

#include "oracles.hpp"
#include "tlr/classify.hpp"
#include "tlr/experiment.hpp"
#include "tlr/parallel.hpp"
#include "tlr/reference.hpp"

using namespace tlr;

TEST_CASE("parallel gram equals the serial reference bitwise") {
  std::mt19937_64 rng(1);
  const Matrix x = oracle::random_matrix(57, 6, rng);
  const Matrix y = oracle::random_matrix(31, 6, rng);
  for (int threads : {1, 3, 4}) {
    const ThreadScope scope(threads);
    for (const auto& spec : {KernelSpec::linear(), KernelSpec::rbf(1.7)}) {
      CHECK(gram(x, y, spec) == reference::gram(x, y, spec));
    }
  }
}

TEST_CASE("parallel knn1 equals the serial reference") {
  std::mt19937_64 rng(2);
  const Matrix train = oracle::random_matrix(80, 5, rng);
  const Matrix test = oracle::random_matrix(45, 5, rng);
  Labels y(80);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<Label>(i % 4);
  const Labels expected = reference::knn1(train, y, test);
  for (int threads : {1, 2, 4}) {
    const ThreadScope scope(threads);
    CHECK(knn1_predict(train, y, test).predicted == expected);
  }
}

TEST_CASE("median bandwidth equals the sorted reference") {
  std::mt19937_64 rng(3);
  for (Eigen::Index n : {2, 7, 40}) {
    const Matrix s = oracle::random_matrix(n, 3, rng);
    const Matrix t = oracle::random_matrix(n + 1, 3, rng);
    const ThreadScope scope(4);
    CHECK(median_bandwidth(s, t) == reference::median_bandwidth(s, t));
  }
  // Pools above the cap are thinned identically.
  const Matrix big = oracle::random_matrix(700, 2, rng);
  CHECK(median_bandwidth(big, big) == reference::median_bandwidth(big, big));
}

TEST_CASE("grid search report does not depend on the thread count") {
  ShiftSpec spec;
  spec.classes = 3;
  spec.n_per_class = 30;
  spec.dim = 6;
  const auto pair = synth_shift_pair(spec, 5);
  GridSpec grid;
  grid.alphas = {1e-4, 1e-2, 1.0};
  grid.betas = {1e-3, 1.0};
  grid.ks = {4, 8, 16};
  ProtocolOptions o;
  o.runs = 3;
  o.per_class = 20;
  o.seed = 8;
  o.threads = 1;
  const std::string serial = format_report_csv(grid_search(pair, grid, KernelSpec::rbf(), o));
  o.threads = 4;
  const std::string parallel = format_report_csv(grid_search(pair, grid, KernelSpec::rbf(), o));
  CHECK(serial == parallel);
}

TEST_CASE("ThreadScope restores the previous count") {
  const int before = max_threads();
  {
    const ThreadScope scope(3);
    CHECK(max_threads() == 3);
  }
  CHECK(max_threads() == before);
}
