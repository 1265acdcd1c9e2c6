#pragma once

#include <optional>
#include <string>

#include "tlr/types.hpp"

namespace tlr {

enum class KernelKind { kLinear, kRbf };

/// Kernel choice. For rbf an empty bandwidth means "median heuristic",
/// resolved against the data by resolve().
struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  std::optional<double> bandwidth;

  static KernelSpec linear() { return {}; }
  static KernelSpec rbf(std::optional<double> sigma = std::nullopt) {
    return {KernelKind::kRbf, sigma};
  }

  bool resolved() const noexcept { return kind == KernelKind::kLinear || bandwidth.has_value(); }
  KernelSpec resolve(const Matrix& source, const Matrix& target) const;
  std::string describe() const;
};

KernelKind parse_kernel_kind(const std::string& name);
std::string to_string(KernelKind kind);

inline constexpr double kBandwidthFloor = 1e-8;
inline constexpr Eigen::Index kBandwidthMaxPoints = 1000;

/// k(x_i, y_j) for every row pair. Rows are processed in parallel.
Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec);

/// Median pairwise Euclidean distance over the pooled rows, floored at
/// kBandwidthFloor. Pools larger than kBandwidthMaxPoints are thinned by an
/// even stride first.
double median_bandwidth(const Matrix& source, const Matrix& target);

/// Joint kernel over source rows stacked above target rows.
class JointKernel {
 public:
  JointKernel(Matrix k, Eigen::Index n_source, Eigen::Index n_target, KernelSpec spec);

  const Matrix& matrix() const noexcept { return k_; }
  Eigen::Index n_source() const noexcept { return n_source_; }
  Eigen::Index n_target() const noexcept { return n_target_; }
  Eigen::Index size() const noexcept { return k_.rows(); }
  const KernelSpec& spec() const noexcept { return spec_; }

  /// Source rows of K (n_source x size).
  auto source_rows() const { return k_.topRows(n_source_); }
  /// Target rows of K (n_target x size).
  auto target_rows() const { return k_.bottomRows(n_target_); }

 private:
  Matrix k_;
  Eigen::Index n_source_;
  Eigen::Index n_target_;
  KernelSpec spec_;
};

/// Assembles [[K_SS, K_ST], [K_TS, K_TT]] and symmetrizes it. An rbf spec
/// without a bandwidth is resolved with median_bandwidth first.
JointKernel build_joint_kernel(const Matrix& source, const Matrix& target, const KernelSpec& spec);

}  // namespace tlr
