#include "tlr/mmd.hpp"

#include <algorithm>

namespace tlr {

MmdMatrix::MmdMatrix(Eigen::Index n_source, Eigen::Index n_target)
    : n_source_(n_source), n_target_(n_target) {
  if (n_source < 1 || n_target < 1) {
    throw std::invalid_argument("MMD matrix needs at least one sample per domain");
  }
  const double n1 = static_cast<double>(n_source);
  const double n2 = static_cast<double>(n_target);
  const Eigen::Index m = n_source + n_target;
  l_.resize(m, m);
  l_.topLeftCorner(n_source, n_source).setConstant(1.0 / (n1 * n1));
  l_.bottomRightCorner(n_target, n_target).setConstant(1.0 / (n2 * n2));
  l_.topRightCorner(n_source, n_target).setConstant(-1.0 / (n1 * n2));
  l_.bottomLeftCorner(n_target, n_source).setConstant(-1.0 / (n1 * n2));
}

MmdMatrix mmd_matrix(Eigen::Index n_source, Eigen::Index n_target) {
  return MmdMatrix(n_source, n_target);
}

double mmd_trace(const Matrix& k, const MmdMatrix& l) {
  if (k.rows() != l.size() || k.cols() != l.size()) {
    throw DimensionError("mmd_trace: kernel is " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + ", MMD matrix is " +
                         std::to_string(l.size()) + "x" + std::to_string(l.size()));
  }
  // tr(K L) = sum_ij K_ij L_ji
  const double value = k.cwiseProduct(l.matrix().transpose()).sum();
  if (value >= 0) return value;
  const double tolerance = kMmdNegativeTolerance * std::max(1.0, k.cwiseAbs().maxCoeff());
  if (value >= -tolerance) return 0.0;
  throw NumericalError("tr(KL) = " + std::to_string(value) + " is negative; kernel is not PSD");
}

double mmd_trace(const JointKernel& k, const MmdMatrix& l) { return mmd_trace(k.matrix(), l); }

double mmd_latent(const Matrix& latent_source, const Matrix& latent_target) {
  if (latent_source.cols() != latent_target.cols()) {
    throw DimensionError("mmd_latent: latent widths " + std::to_string(latent_source.cols()) +
                         " and " + std::to_string(latent_target.cols()) + " differ");
  }
  if (latent_source.rows() == 0 || latent_target.rows() == 0) {
    throw std::invalid_argument("mmd_latent: empty domain");
  }
  const Eigen::RowVectorXd gap = latent_source.colwise().mean() - latent_target.colwise().mean();
  return gap.squaredNorm();
}

double normalized_mmd_trace(const JointKernel& k, const MmdMatrix& l) {
  const Matrix& km = k.matrix();
  const double m = static_cast<double>(km.rows());
  // mean_i ||f(x_i) - mu||^2 = tr(K)/m - sum(K)/m^2
  const double dispersion = km.trace() / m - km.sum() / (m * m);
  if (!(dispersion > 0)) return 0.0;
  return mmd_trace(k, l) / dispersion;
}

double normalized_mmd_latent(const Matrix& latent_source, const Matrix& latent_target) {
  const double gap = mmd_latent(latent_source, latent_target);
  Matrix pooled(latent_source.rows() + latent_target.rows(), latent_source.cols());
  pooled << latent_source, latent_target;
  const double dispersion = (pooled.rowwise() - pooled.colwise().mean()).squaredNorm() /
                            static_cast<double>(pooled.rows());
  if (!(dispersion > 0)) return 0.0;
  return gap / dispersion;
}

}  // namespace tlr
