#include "tlr/solver.hpp"

#include <algorithm>
#include <cmath>

namespace tlr {

void TlrHyperparams::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
  if (k < 1) throw std::invalid_argument("latent dimension k must be at least 1");
  if (!(ridge >= 0) || !std::isfinite(ridge)) throw std::invalid_argument("ridge must be >= 0");
}

void TlrHyperparams::validate(Eigen::Index m) const {
  validate();
  if (k >= m) {
    throw std::invalid_argument("latent dimension k = " + std::to_string(k) +
                                " must be below n1 + n2 = " + std::to_string(m));
  }
}

DiagonalMatrix build_M(Eigen::Index n_source, Eigen::Index n_target, double alpha, double beta) {
  if (n_source < 1 || n_target < 1) throw std::invalid_argument("build_M needs positive counts");
  Vector diag(n_source + n_target);
  diag.head(n_source).setConstant(alpha);
  diag.tail(n_target).setConstant(beta);
  return DiagonalMatrix(diag);
}

namespace {

Matrix symmetrized(const Matrix& x) { return 0.5 * (x + x.transpose()); }

void check_square(const Matrix& x, Eigen::Index m, const char* what) {
  if (x.rows() != m || x.cols() != m) {
    throw DimensionError(std::string(what) + " is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", expected " + std::to_string(m) + "x" +
                         std::to_string(m));
  }
}

// Largest-magnitude entry of every column becomes positive; first index wins ties.
template <typename Derived>
void fix_signs(Eigen::MatrixBase<Derived>& w) {
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::Index at = 0;
    w.col(c).cwiseAbs().maxCoeff(&at);
    if (w(at, c) < 0) w.col(c) = -w.col(c);
  }
}

using Chol = Eigen::LLT<Eigen::MatrixXd>;

Chol factor_i_plus_b(const Matrix& b) {
  Eigen::MatrixXd ib = b;
  ib.diagonal().array() += 1.0;
  Chol chol(ib);
  if (chol.info() != Eigen::Success) {
    throw NumericalError("Cholesky of I + B failed; B is not positive semidefinite");
  }
  return chol;
}

// Leading eigenpairs of the reduced matrix C = L^-1 A L^-T, mapped back by
// w = L^-T y. Columns come out with w^T (I+B) w = 1.
Projection finish(const Eigen::MatrixXd& c, const Chol& chol, Eigen::Index k) {
  const Eigen::Index m = c.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");

  Eigen::MatrixXd y(m, k);
  Projection out;
  out.eigenvalues.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    y.col(i) = eig.eigenvectors().col(m - 1 - i);
    out.eigenvalues(i) = eig.eigenvalues()(m - 1 - i);
  }
  chol.matrixU().solveInPlace(y);
  fix_signs(y);
  out.w = y;
  return out;
}

void apply_normalization(Projection& p, Normalization normalization) {
  if (normalization == Normalization::kIPlusB) return;
  // Under (I+B)-normalization w^T A w equals the eigenvalue.
  const double floor = 1e-12 * std::max(1.0, std::abs(p.eigenvalues(0)));
  for (Eigen::Index i = 0; i < p.w.cols(); ++i) {
    const double lambda = p.eigenvalues(i);
    if (!(lambda > floor)) {
      throw NumericalError("eigenvalue " + std::to_string(i) + " is " + std::to_string(lambda) +
                           "; W^T A W = I normalization needs a positive spectrum (set a ridge)");
    }
    p.w.col(i) /= std::sqrt(lambda);
  }
}

}  // namespace

SolverMatrices build_AB(const Matrix& k, const Matrix& l, const DiagonalMatrix& m) {
  const Eigen::Index size = k.rows();
  check_square(k, size, "K");
  check_square(l, size, "L");
  if (m.rows() != size) throw DimensionError("M does not match the kernel size");
  const Matrix km = k * m;
  const Matrix kl = k * l;
  return SolverMatrices{symmetrized(km * k), symmetrized(kl * k), m};
}

SolverMatrices build_AB(const JointKernel& k, const MmdMatrix& l, const DiagonalMatrix& m) {
  return build_AB(k.matrix(), l.matrix(), m);
}

Projection solve_W(const SolverMatrices& mats, Eigen::Index k, Normalization normalization,
                   double ridge) {
  const Eigen::Index m = mats.a.rows();
  check_square(mats.a, m, "A");
  check_square(mats.b, m, "B");
  if (k < 1 || k >= m) {
    throw std::invalid_argument("latent dimension k = " + std::to_string(k) +
                                " must lie in [1, " + std::to_string(m - 1) + "]");
  }
  if (!(ridge >= 0)) throw std::invalid_argument("ridge must be >= 0");

  const Chol chol = factor_i_plus_b(mats.b);
  Eigen::MatrixXd a = mats.a;
  a.diagonal().array() += ridge;
  // C = L^-1 A L^-T, using A = A^T.
  Eigen::MatrixXd half = chol.matrixL().solve(a);
  Eigen::MatrixXd c = chol.matrixL().solve(half.transpose());
  c = 0.5 * (c + c.transpose()).eval();

  Projection p = finish(c, chol, k);
  apply_normalization(p, normalization);
  return p;
}

ReducedProblem::ReducedProblem(const JointKernel& k, const MmdMatrix& l)
    : chol_(factor_i_plus_b(symmetrized(k.matrix() * l.matrix() * k.matrix()))) {
  if (l.size() != k.size() || l.n_source() != k.n_source()) {
    throw DimensionError("MMD matrix does not match the joint kernel");
  }
  // K_S^T K_S = (L^-1 K_S^T)(L^-1 K_S^T)^T after the reduction.
  const Eigen::MatrixXd zs = chol_.matrixL().solve(Eigen::MatrixXd(k.source_rows().transpose()));
  const Eigen::MatrixXd zt = chol_.matrixL().solve(Eigen::MatrixXd(k.target_rows().transpose()));
  source_part_ = zs * zs.transpose();
  target_part_ = zt * zt.transpose();
  source_part_ = 0.5 * (source_part_ + source_part_.transpose()).eval();
  target_part_ = 0.5 * (target_part_ + target_part_.transpose()).eval();
}

Projection ReducedProblem::solve(double alpha, double beta, Eigen::Index k) const {
  if (k < 1 || k >= size()) {
    throw std::invalid_argument("latent dimension k = " + std::to_string(k) +
                                " must lie in [1, " + std::to_string(size() - 1) + "]");
  }
  const Eigen::MatrixXd c = alpha * source_part_ + beta * target_part_;
  return finish(c, chol_, k);
}

Matrix TlrModel::embed(const Matrix& x) const { return gram(x, training, kernel) * w; }

FitResult fit(const DomainPair& pair, const KernelSpec& spec, const TlrHyperparams& hyper) {
  const Eigen::Index n1 = pair.source.rows();
  const Eigen::Index n2 = pair.target.rows();
  hyper.validate(n1 + n2);

  JointKernel k = build_joint_kernel(pair.source.features(), pair.target.features(), spec);
  const MmdMatrix l = mmd_matrix(n1, n2);
  const SolverMatrices mats = build_AB(k, l, build_M(n1, n2, hyper.alpha, hyper.beta));
  Projection p = solve_W(mats, hyper.k, hyper.normalization, hyper.ridge);

  Matrix latent_source = k.source_rows() * p.w;
  Matrix latent_target = k.target_rows() * p.w;

  TlrModel model;
  model.w = std::move(p.w);
  model.eigenvalues = std::move(p.eigenvalues);
  model.hyper = hyper;
  model.kernel = k.spec();
  model.training.resize(n1 + n2, pair.source.dim());
  model.training << pair.source.features(), pair.target.features();
  model.n_source = n1;
  model.n_target = n2;
  return FitResult{std::move(model), std::move(latent_source), std::move(latent_target),
                   std::move(k)};
}

double objective_raw(const Matrix& w, const JointKernel& k, const MmdMatrix& l,
                     const TlrHyperparams& hyper) {
  if (w.rows() != k.size() || l.size() != k.size()) {
    throw DimensionError("objective_raw: W, K and L sizes disagree");
  }
  const Matrix kw = k.matrix() * w;
  const double mmd = (kw.transpose() * l.matrix() * kw).trace();
  const Matrix wwt = w * w.transpose();
  const auto hs = k.source_rows();
  const auto ht = k.target_rows();
  const double rec_s = (hs * wwt - hs).squaredNorm();
  const double rec_t = (ht * wwt - ht).squaredNorm();
  return mmd + hyper.alpha * rec_s + hyper.beta * rec_t;
}

double objective_expanded(const Matrix& w, const SolverMatrices& mats) {
  const Eigen::Index m = mats.a.rows();
  check_square(mats.a, m, "A");
  check_square(mats.b, m, "B");
  if (w.rows() != m) throw DimensionError("objective_expanded: W has the wrong row count");
  const Matrix wtaw = w.transpose() * mats.a * w;
  const Matrix wtw = w.transpose() * w;
  // tr(W W^T A W W^T) = tr((W^T W)(W^T A W))
  const double quartic = (wtw * wtaw).trace();
  const double mmd = (w.transpose() * mats.b * w).trace();
  return quartic + mmd - 2.0 * wtaw.trace() + mats.a.trace();
}

double trace_ratio(const Matrix& w, const SolverMatrices& mats) {
  const Eigen::Index m = mats.a.rows();
  if (w.rows() != m || mats.b.rows() != m) throw DimensionError("trace_ratio: size mismatch");
  Matrix ib = mats.b;
  ib.diagonal().array() += 1.0;
  const Eigen::MatrixXd denom = w.transpose() * ib * w;
  const Eigen::MatrixXd numer = w.transpose() * mats.a * w;
  return denom.ldlt().solve(numer).trace();
}

double stationarity_residual(const Matrix& w, const Vector& eigenvalues,
                             const SolverMatrices& mats) {
  const Eigen::Index m = mats.a.rows();
  if (w.rows() != m || eigenvalues.size() != w.cols()) {
    throw DimensionError("stationarity_residual: size mismatch");
  }
  Matrix ib = mats.b;
  ib.diagonal().array() += 1.0;
  const Matrix aw = mats.a * w;
  const Matrix lhs = ib * w * eigenvalues.asDiagonal();
  return (lhs - aw).norm() / std::max(aw.norm(), 1e-300);
}

double stationarity_residual(const Projection& p, const SolverMatrices& mats) {
  return stationarity_residual(p.w, p.eigenvalues, mats);
}

}  // namespace tlr
