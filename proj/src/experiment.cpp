#include "tlr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "tlr/classify.hpp"
#include "tlr/mmd.hpp"
#include "tlr/parallel.hpp"
#include "tlr/solver.hpp"

namespace tlr {

GridSpec GridSpec::default_grid() {
  GridSpec grid;
  grid.alphas = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0};
  grid.betas = grid.alphas;
  for (Eigen::Index k = 10; k <= 200; k += 10) grid.ks.push_back(k);
  return grid;
}

void GridSpec::validate() const {
  if (alphas.empty() || betas.empty() || ks.empty()) {
    throw std::invalid_argument("grid lists must be non-empty");
  }
  const auto positive = [](double v) { return v > 0 && std::isfinite(v); };
  if (!std::all_of(alphas.begin(), alphas.end(), positive) ||
      !std::all_of(betas.begin(), betas.end(), positive)) {
    throw std::invalid_argument("grid alphas and betas must be positive");
  }
  if (std::any_of(ks.begin(), ks.end(), [](Eigen::Index k) { return k < 1; })) {
    throw std::invalid_argument("grid k values must be >= 1");
  }
}

double ConfigRecord::mean() const {
  if (accuracies.empty()) return 0.0;
  return std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
         static_cast<double>(accuracies.size());
}

double ConfigRecord::stddev() const {
  if (accuracies.empty()) return 0.0;
  const double mu = mean();
  double ss = 0.0;
  for (double a : accuracies) ss += (a - mu) * (a - mu);
  return std::sqrt(ss / static_cast<double>(accuracies.size()));
}

const ConfigRecord& ExperimentReport::best_record() const {
  if (records.empty()) throw std::logic_error("report has no records");
  return records.at(best);
}

Seed run_seed(Seed seed, std::size_t run) {
  // splitmix64 finalizer over seed + run
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Accuracy of 1-NN for every k in `ks` (ascending) using the leading columns
// of the latent blocks. Squared distances grow column by column in ascending
// order, which is the same summation knn1_predict performs.
std::vector<double> nested_knn_accuracy(const Matrix& latent_source, const Labels& source_labels,
                                        const Matrix& latent_target, const Labels& truth,
                                        const std::vector<Eigen::Index>& ks) {
  const Eigen::Index n_test = latent_target.rows();
  const Eigen::Index n_train = latent_source.rows();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dist =
      Eigen::MatrixXd::Zero(n_test, n_train);
  std::vector<double> out;
  out.reserve(ks.size());
  Eigen::Index done = 0;
  for (Eigen::Index k : ks) {
    for (Eigen::Index c = done; c < k; ++c) {
      for (Eigen::Index t = 0; t < n_test; ++t) {
        const double tv = latent_target(t, c);
        for (Eigen::Index i = 0; i < n_train; ++i) {
          const double diff = tv - latent_source(i, c);
          dist(t, i) += diff * diff;
        }
      }
    }
    done = k;
    std::size_t hits = 0;
    for (Eigen::Index t = 0; t < n_test; ++t) {
      Eigen::Index arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n_train; ++i) {
        if (dist(t, i) < best) {
          best = dist(t, i);
          arg = i;
        }
      }
      hits += source_labels[static_cast<std::size_t>(arg)] == truth[static_cast<std::size_t>(t)];
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(n_test));
  }
  return out;
}

Eigen::Index sampled_source_rows(const LabeledMatrix& source, std::optional<std::size_t> per_class) {
  if (!per_class) return source.rows();
  std::map<Label, std::size_t> counts;
  for (Label l : source.require_labels()) ++counts[l];
  std::size_t total = 0;
  for (const auto& [label, count] : counts) total += std::min(count, *per_class);
  return static_cast<Eigen::Index>(total);
}

}  // namespace

ExperimentReport grid_search(const DomainPair& pair, const GridSpec& grid, const KernelSpec& kernel,
                             const ProtocolOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  grid.validate();
  if (options.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (options.per_class && *options.per_class < 1) {
    throw std::invalid_argument("per_class must be >= 1");
  }
  if (!pair.target.has_labels()) {
    throw std::invalid_argument("grid search scores against target labels, which are absent");
  }
  const ThreadScope threads(options.threads);
  const DomainPair data = standardize(pair, options.zscore);
  const Labels& truth = *data.target.labels();

  const Eigen::Index m = sampled_source_rows(data.source, options.per_class) + data.target.rows();

  ExperimentReport report;
  report.pair_id = options.pair_id;
  report.grid_size = grid.size();

  std::vector<Eigen::Index> valid_ks;
  for (Eigen::Index k : grid.ks) {
    if (k < m) valid_ks.push_back(k);
  }
  std::sort(valid_ks.begin(), valid_ks.end());
  valid_ks.erase(std::unique(valid_ks.begin(), valid_ks.end()), valid_ks.end());
  if (valid_ks.empty()) {
    throw std::invalid_argument("empty effective grid: every k is >= n1 + n2 = " +
                                std::to_string(m));
  }
  const Eigen::Index k_max = valid_ks.back();

  // Record slots in grid order; skipped ones are listed separately.
  std::map<std::tuple<std::size_t, std::size_t, Eigen::Index>, std::size_t> slot;
  for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
    for (std::size_t b = 0; b < grid.betas.size(); ++b) {
      for (Eigen::Index k : grid.ks) {
        if (k >= m) {
          report.skipped.push_back({grid.alphas[a], grid.betas[b], k,
                                    "k >= n1 + n2 = " + std::to_string(m)});
          continue;
        }
        slot.emplace(std::make_tuple(a, b, k), report.records.size());
        report.records.push_back({grid.alphas[a], grid.betas[b], k,
                                  std::vector<double>(options.runs, 0.0)});
      }
    }
  }

  const std::size_t n_pairs = grid.alphas.size() * grid.betas.size();
  // Without per-class sampling every run sees the same data.
  const std::size_t distinct_runs = options.per_class ? options.runs : 1;
  for (std::size_t run = 0; run < distinct_runs; ++run) {
    const LabeledMatrix source =
        options.per_class ? sample_per_class(data.source, *options.per_class, run_seed(options.seed, run))
                          : data.source;
    const Labels& source_labels = *source.labels();
    const JointKernel k = build_joint_kernel(source.features(), data.target.features(), kernel);
    const ReducedProblem problem(k, mmd_matrix(k.n_source(), k.n_target()));

    std::vector<std::vector<double>> accuracies(n_pairs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t job = 0; job < n_pairs; ++job) {
      const double alpha = grid.alphas[job / grid.betas.size()];
      const double beta = grid.betas[job % grid.betas.size()];
      const Projection p = problem.solve(alpha, beta, k_max);
      const Matrix latent_source = k.source_rows() * p.w;
      const Matrix latent_target = k.target_rows() * p.w;
      accuracies[job] =
          nested_knn_accuracy(latent_source, source_labels, latent_target, truth, valid_ks);
    }

    for (std::size_t job = 0; job < n_pairs; ++job) {
      const std::size_t a = job / grid.betas.size();
      const std::size_t b = job % grid.betas.size();
      for (std::size_t i = 0; i < valid_ks.size(); ++i) {
        const std::size_t at = slot.at(std::make_tuple(a, b, valid_ks[i]));
        if (options.per_class) {
          report.records[at].accuracies[run] = accuracies[job][i];
        } else {
          std::fill(report.records[at].accuracies.begin(), report.records[at].accuracies.end(),
                    accuracies[job][i]);
        }
      }
    }
  }

  for (std::size_t i = 1; i < report.records.size(); ++i) {
    if (report.records[i].mean() > report.records[report.best].mean()) report.best = i;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ExperimentReport run_protocol_ixmas_style(const DomainPair& pair, const GridSpec& grid,
                                          const KernelSpec& kernel, std::size_t per_class,
                                          std::size_t runs, Seed seed, const std::string& pair_id,
                                          int threads) {
  pair.source.require_labels();
  ProtocolOptions options;
  options.pair_id = pair_id;
  options.runs = runs;
  options.per_class = per_class;
  options.seed = seed;
  options.threads = threads;
  return grid_search(pair, grid, kernel, options);
}

BaselineResult evaluate_baselines(const DomainPair& standardized, const GridSpec& grid,
                                  PcaMode mode) {
  if (!standardized.target.has_labels()) {
    throw std::invalid_argument("baselines need target labels for scoring");
  }
  BaselineResult out;
  out.no_adaptation = *no_adaptation_predict(standardized).accuracy;

  const Eigen::Index d = standardized.source.dim();
  std::vector<Eigen::Index> ks;
  for (Eigen::Index k : grid.ks) {
    if (k <= d) ks.push_back(k);
  }
  if (ks.empty()) ks.push_back(d);
  out.pca_best = -1.0;
  for (Eigen::Index k : ks) {
    const auto [ps, pt] =
        pca_fit_transform(standardized.source.features(), standardized.target.features(), k, mode);
    const double acc = *knn1_predict(ps, *standardized.source.labels(), pt,
                                     *standardized.target.labels())
                            .accuracy;
    if (acc > out.pca_best) {
      out.pca_best = acc;
      out.pca_best_k = k;
    }
  }
  return out;
}

}  // namespace tlr
