#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tlr/classify.hpp"
#include "tlr/dataset.hpp"
#include "tlr/kernel.hpp"
#include "tlr/types.hpp"

namespace tlr {

struct GridSpec {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<Eigen::Index> ks;

  /// alpha, beta in {1e-5, ..., 1e0}; k in {10, 20, ..., 200}.
  static GridSpec default_grid();
  std::size_t size() const noexcept { return alphas.size() * betas.size() * ks.size(); }
  void validate() const;
};

struct ConfigRecord {
  double alpha = 0;
  double beta = 0;
  Eigen::Index k = 0;
  std::vector<double> accuracies;  // one per run

  double mean() const;
  /// Population standard deviation over runs.
  double stddev() const;
};

struct SkippedConfig {
  double alpha;
  double beta;
  Eigen::Index k;
  std::string reason;
};

struct ExperimentReport {
  std::string pair_id;
  std::vector<ConfigRecord> records;
  std::vector<SkippedConfig> skipped;
  /// Total configurations in the grid: records.size() + skipped.size().
  std::size_t grid_size = 0;
  std::size_t best = 0;
  double seconds = 0;  // wall clock; never written to the CSV report

  const ConfigRecord& best_record() const;
};

struct ProtocolOptions {
  std::string pair_id = "pair";
  std::size_t runs = 1;
  /// Source rows drawn per class for every run; nullopt uses the full source.
  std::optional<std::size_t> per_class;
  Seed seed = 0;
  ZScoreMode zscore = ZScoreMode::kPerDomain;
  /// OpenMP workers for the configuration jobs; 0 keeps the current default.
  int threads = 0;
};

/// Fits TLR for every grid configuration and scores it with 1-NN on the full
/// target. Configurations with k >= n1 + n2 are recorded in `skipped`.
/// Jobs are independent and merged by configuration index, so the report does
/// not depend on the thread count.
ExperimentReport grid_search(const DomainPair& pair, const GridSpec& grid, const KernelSpec& kernel,
                             const ProtocolOptions& options);

/// Repeated per-class sampling of the source (30 per class, 10 runs unless
/// overridden), full target as test set.
ExperimentReport run_protocol_ixmas_style(const DomainPair& pair, const GridSpec& grid,
                                          const KernelSpec& kernel, std::size_t per_class = 30,
                                          std::size_t runs = 10, Seed seed = 0,
                                          const std::string& pair_id = "pair", int threads = 0);

/// Seed for the per-class draw of run `run`.
Seed run_seed(Seed seed, std::size_t run);

struct BaselineResult {
  double no_adaptation = 0;
  double pca_best = 0;
  Eigen::Index pca_best_k = 0;
};

/// Raw 1-NN and the best per-domain PCA over the grid's k values that fit
/// the feature dimension (or k = d when none does).
BaselineResult evaluate_baselines(const DomainPair& standardized, const GridSpec& grid,
                                  PcaMode mode = PcaMode::kPerDomain);

enum class ReportFormat { kCsv, kMarkdown };

/// CSV: header "pair,alpha,beta,k,run,accuracy", one line per run.
std::string format_report_csv(const ExperimentReport& report);
std::string format_report_markdown(const std::vector<ExperimentReport>& reports);
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path);
/// Parses the CSV form back into per-configuration records (one report per
/// pair id, in first-seen order).
std::vector<ExperimentReport> parse_report_csv(const std::string& text);

std::string format_number(double value);

}  // namespace tlr
