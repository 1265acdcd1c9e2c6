#pragma once

#include <cstdint>
#include <optional>

#include "tlr/dataset.hpp"
#include "tlr/kernel.hpp"
#include "tlr/mmd.hpp"
#include "tlr/types.hpp"

namespace tlr {

/// Column normalization applied to the projection.
enum class Normalization {
  /// w_i^T (I+B) w_j = delta_ij. Always well defined.
  kIPlusB,
  /// w_i^T (A + ridge I) w_j = delta_ij. Fails on non-positive eigenvalues.
  kA,
};

struct TlrHyperparams {
  double alpha = 1.0;
  double beta = 1.0;
  Eigen::Index k = 10;
  /// Added to the diagonal of A; only meaningful with Normalization::kA.
  double ridge = 0.0;
  Normalization normalization = Normalization::kIPlusB;

  /// Throws std::invalid_argument unless alpha, beta > 0, k >= 1, ridge >= 0.
  void validate() const;
  /// Additionally requires k < m.
  void validate(Eigen::Index m) const;
};

using DiagonalMatrix = Eigen::DiagonalMatrix<double, Eigen::Dynamic>;

/// diag(alpha * 1_{n1}, beta * 1_{n2}).
DiagonalMatrix build_M(Eigen::Index n_source, Eigen::Index n_target, double alpha, double beta);

struct SolverMatrices {
  Matrix a;
  Matrix b;
  DiagonalMatrix m;
};

/// A = K M K and B = K L K, each symmetrized.
SolverMatrices build_AB(const JointKernel& k, const MmdMatrix& l, const DiagonalMatrix& m);
SolverMatrices build_AB(const Matrix& k, const Matrix& l, const DiagonalMatrix& m);

struct Projection {
  /// m x k, columns ordered by descending eigenvalue.
  Matrix w;
  /// Leading eigenvalues of (I+B)^-1 A, descending.
  Vector eigenvalues;
};

/// Leading k eigenvectors of (I+B)^-1 A through the Cholesky reduction
/// I+B = L L^T, C = L^-1 A L^-T. Each column's largest-magnitude entry is
/// made positive.
Projection solve_W(const SolverMatrices& mats, Eigen::Index k,
                   Normalization normalization = Normalization::kIPlusB, double ridge = 0.0);

/// The generalized problem with (I+B) factored once, so that every (alpha,
/// beta) pair only costs one symmetric eigensolve. A = alpha * K_S^T K_S +
/// beta * K_T^T K_T, which equals K M K for symmetric K.
class ReducedProblem {
 public:
  ReducedProblem(const JointKernel& k, const MmdMatrix& l);

  Eigen::Index size() const noexcept { return source_part_.rows(); }
  Projection solve(double alpha, double beta, Eigen::Index k) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd source_part_;  // L^-1 K_S^T K_S L^-T
  Eigen::MatrixXd target_part_;  // L^-1 K_T^T K_T L^-T
};

/// Learned projection plus what is needed to embed further samples.
struct TlrModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  Matrix w;
  Vector eigenvalues;
  TlrHyperparams hyper;
  KernelSpec kernel;  // always resolved
  /// Training rows (source stacked over target) that define the kernel map.
  Matrix training;
  Eigen::Index n_source = 0;
  Eigen::Index n_target = 0;

  /// k(x, training) * W for new rows x.
  Matrix embed(const Matrix& x) const;
};

struct FitResult {
  TlrModel model;
  Matrix latent_source;  // H_S W
  Matrix latent_target;  // H_T W
  JointKernel kernel;
};

FitResult fit(const DomainPair& pair, const KernelSpec& spec, const TlrHyperparams& hyper);

/// tr(W^T K L K W) + alpha ||H_S W W^T - H_S||_F^2 + beta ||H_T W W^T - H_T||_F^2.
double objective_raw(const Matrix& w, const JointKernel& k, const MmdMatrix& l,
                     const TlrHyperparams& hyper);
/// tr(W W^T A W W^T) + tr(W^T B W) - 2 tr(W^T A W) + tr(A).
double objective_expanded(const Matrix& w, const SolverMatrices& mats);

/// tr((W^T (I+B) W)^-1 W^T A W).
double trace_ratio(const Matrix& w, const SolverMatrices& mats);

/// ||(I+B) W diag(lambda) - A W||_F / max(||A W||_F, 1e-300).
double stationarity_residual(const Matrix& w, const Vector& eigenvalues,
                             const SolverMatrices& mats);
double stationarity_residual(const Projection& p, const SolverMatrices& mats);

/// Binary round-trip of every model field, tagged "TLRM" + version.
void save_model(const TlrModel& model, const std::filesystem::path& path);
TlrModel load_model(const std::filesystem::path& path);
void write_model(const TlrModel& model, std::ostream& out);
TlrModel read_model(std::istream& in);

}  // namespace tlr
