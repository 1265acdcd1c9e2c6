#include "tlr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlr/experiment.hpp"

namespace tlr {

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected linear or rbf)");
}

std::string to_string(KernelKind kind) { return kind == KernelKind::kLinear ? "linear" : "rbf"; }

KernelSpec KernelSpec::resolve(const Matrix& source, const Matrix& target) const {
  if (resolved()) return *this;
  return rbf(median_bandwidth(source, target));
}

std::string KernelSpec::describe() const {
  if (kind == KernelKind::kLinear) return "linear";
  return bandwidth ? "rbf(sigma=" + format_number(*bandwidth) + ")" : "rbf(sigma=auto)";
}

namespace {

void check_spec(const KernelSpec& spec) {
  if (spec.kind == KernelKind::kRbf) {
    if (!spec.bandwidth) throw std::invalid_argument("rbf kernel bandwidth is unresolved");
    if (!(*spec.bandwidth > 0) || !std::isfinite(*spec.bandwidth)) {
      throw std::invalid_argument("rbf bandwidth must be positive and finite");
    }
  }
}

}  // namespace

Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec) {
  if (x.cols() != y.cols()) {
    throw DimensionError("gram: inputs have " + std::to_string(x.cols()) + " and " +
                         std::to_string(y.cols()) + " columns");
  }
  check_spec(spec);
  Matrix out(x.rows(), y.rows());
  const Eigen::Index n = x.rows();
  const Eigen::Index m = y.rows();
  if (spec.kind == KernelKind::kLinear) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) out(i, j) = x.row(i).dot(y.row(j));
    }
  } else {
    const double scale = -1.0 / (2.0 * *spec.bandwidth * *spec.bandwidth);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        out(i, j) = std::exp(scale * (x.row(i) - y.row(j)).squaredNorm());
      }
    }
  }
  return out;
}

namespace {

Matrix pool_for_bandwidth(const Matrix& source, const Matrix& target) {
  if (source.cols() != target.cols()) throw DimensionError("median_bandwidth: dimension mismatch");
  const Eigen::Index total = source.rows() + target.rows();
  if (total < 2) throw std::invalid_argument("median_bandwidth needs at least 2 samples");
  const Eigen::Index keep = std::min(total, kBandwidthMaxPoints);
  Matrix pooled(keep, source.cols());
  for (Eigen::Index i = 0; i < keep; ++i) {
    const Eigen::Index src = i * total / keep;
    pooled.row(i) = src < source.rows() ? source.row(src) : target.row(src - source.rows());
  }
  return pooled;
}

double median_of(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double median_bandwidth(const Matrix& source, const Matrix& target) {
  const Matrix pooled = pool_for_bandwidth(source, target);
  const Eigen::Index n = pooled.rows();
  std::vector<double> dist(static_cast<std::size_t>(n * (n - 1) / 2));
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) {
    // Pairs (i, j > i) occupy a contiguous run starting at offset(i).
    std::size_t at = static_cast<std::size_t>(i * n - i * (i + 1) / 2);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist[at++] = (pooled.row(i) - pooled.row(j)).norm();
    }
  }
  return std::max(median_of(dist), kBandwidthFloor);
}

JointKernel::JointKernel(Matrix k, Eigen::Index n_source, Eigen::Index n_target, KernelSpec spec)
    : k_(std::move(k)), n_source_(n_source), n_target_(n_target), spec_(std::move(spec)) {
  if (n_source_ < 1 || n_target_ < 1) throw DimensionError("joint kernel needs both domains");
  if (k_.rows() != k_.cols() || k_.rows() != n_source_ + n_target_) {
    throw DimensionError("joint kernel must be square of size n_source + n_target");
  }
  const double scale = std::max(1.0, k_.cwiseAbs().maxCoeff());
  if ((k_ - k_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalError("joint kernel is not symmetric");
  }
}

JointKernel build_joint_kernel(const Matrix& source, const Matrix& target, const KernelSpec& spec) {
  if (source.cols() != target.cols()) {
    throw DimensionError("build_joint_kernel: source has " + std::to_string(source.cols()) +
                         " features, target has " + std::to_string(target.cols()));
  }
  const KernelSpec resolved = spec.resolve(source, target);
  const Eigen::Index n1 = source.rows();
  const Eigen::Index n2 = target.rows();
  Matrix k(n1 + n2, n1 + n2);
  k.topLeftCorner(n1, n1) = gram(source, source, resolved);
  k.topRightCorner(n1, n2) = gram(source, target, resolved);
  k.bottomLeftCorner(n2, n1) = gram(target, source, resolved);
  k.bottomRightCorner(n2, n2) = gram(target, target, resolved);
  Matrix sym = 0.5 * (k + k.transpose());
  return JointKernel(std::move(sym), n1, n2, resolved);
}

}  // namespace tlr
