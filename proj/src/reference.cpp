#include "tlr/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tlr::reference {

Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec) {
  if (x.cols() != y.cols()) throw DimensionError("gram: dimension mismatch");
  if (spec.kind == KernelKind::kRbf && !spec.bandwidth) {
    throw std::invalid_argument("rbf kernel bandwidth is unresolved");
  }
  Matrix out(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      if (spec.kind == KernelKind::kLinear) {
        out(i, j) = x.row(i).dot(y.row(j));
      } else {
        const double s = *spec.bandwidth;
        out(i, j) = std::exp(-1.0 / (2.0 * s * s) * (x.row(i) - y.row(j)).squaredNorm());
      }
    }
  }
  return out;
}

Labels knn1(const Matrix& train, const Labels& train_labels, const Matrix& test) {
  if (train.cols() != test.cols()) throw DimensionError("knn1: dimension mismatch");
  if (train.rows() == 0) throw std::invalid_argument("knn1: empty training set");
  Labels out(static_cast<std::size_t>(test.rows()));
  for (Eigen::Index t = 0; t < test.rows(); ++t) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < train.cols(); ++j) {
        const double diff = test(t, j) - train(i, j);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    out[static_cast<std::size_t>(t)] = train_labels[static_cast<std::size_t>(arg)];
  }
  return out;
}

double median_bandwidth(const Matrix& source, const Matrix& target) {
  if (source.cols() != target.cols()) throw DimensionError("median_bandwidth: dimension mismatch");
  const Eigen::Index total = source.rows() + target.rows();
  if (total < 2) throw std::invalid_argument("median_bandwidth needs at least 2 samples");
  const Eigen::Index keep = std::min(total, kBandwidthMaxPoints);
  Matrix pooled(keep, source.cols());
  for (Eigen::Index i = 0; i < keep; ++i) {
    const Eigen::Index src = i * total / keep;
    pooled.row(i) = src < source.rows() ? source.row(src) : target.row(src - source.rows());
  }
  std::vector<double> dist;
  for (Eigen::Index i = 0; i < keep; ++i) {
    for (Eigen::Index j = i + 1; j < keep; ++j) dist.push_back((pooled.row(i) - pooled.row(j)).norm());
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t mid = dist.size() / 2;
  const double median = dist.size() % 2 ? dist[mid] : 0.5 * (dist[mid - 1] + dist[mid]);
  return std::max(median, kBandwidthFloor);
}

}  // namespace tlr::reference
