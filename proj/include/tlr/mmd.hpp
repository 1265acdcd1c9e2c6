#pragma once

#include "tlr/kernel.hpp"
#include "tlr/types.hpp"

namespace tlr {

/// Coefficient matrix of the biased MMD estimate: 1/n1^2 on the source block,
/// 1/n2^2 on the target block and -1/(n1 n2) across. Stored dense.
class MmdMatrix {
 public:
  MmdMatrix(Eigen::Index n_source, Eigen::Index n_target);

  const Matrix& matrix() const noexcept { return l_; }
  Eigen::Index n_source() const noexcept { return n_source_; }
  Eigen::Index n_target() const noexcept { return n_target_; }
  Eigen::Index size() const noexcept { return l_.rows(); }

 private:
  Matrix l_;
  Eigen::Index n_source_;
  Eigen::Index n_target_;
};

MmdMatrix mmd_matrix(Eigen::Index n_source, Eigen::Index n_target);

/// Tolerance below zero that tr(KL) may reach through rounding before it is
/// treated as evidence of a non-PSD kernel. Scaled by max(1, max|K|).
inline constexpr double kMmdNegativeTolerance = 1e-10;

/// tr(K L). Small negative rounding is clamped to 0; anything below
/// -kMmdNegativeTolerance * max(1, max|K|) throws NumericalError.
double mmd_trace(const JointKernel& k, const MmdMatrix& l);
double mmd_trace(const Matrix& k, const MmdMatrix& l);

/// Squared distance between the column means of two latent blocks.
double mmd_latent(const Matrix& latent_source, const Matrix& latent_target);

/// MMD divided by the pooled dispersion (mean squared distance of all samples
/// to the pooled mean) in the same space. Scale-free, so kernel-space and
/// latent-space gaps can be compared. Returns 0 when the dispersion is 0.
double normalized_mmd_trace(const JointKernel& k, const MmdMatrix& l);
double normalized_mmd_latent(const Matrix& latent_source, const Matrix& latent_target);

}  // namespace tlr
