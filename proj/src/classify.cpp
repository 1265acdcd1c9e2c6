#include "tlr/classify.hpp"

#include <limits>

namespace tlr {

PredictionResult knn1_predict(const Matrix& train, const Labels& train_labels, const Matrix& test) {
  if (train.cols() != test.cols()) {
    throw DimensionError("knn1: train has " + std::to_string(train.cols()) +
                         " columns, test has " + std::to_string(test.cols()));
  }
  if (train.rows() == 0) throw std::invalid_argument("knn1: empty training set");
  if (static_cast<Eigen::Index>(train_labels.size()) != train.rows()) {
    throw DimensionError("knn1: label count does not match training rows");
  }
  const Eigen::Index n_test = test.rows();
  const Eigen::Index n_train = train.rows();
  const Eigen::Index dim = train.cols();
  PredictionResult out;
  out.predicted.resize(static_cast<std::size_t>(n_test));
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < n_test; ++t) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index i = 0; i < n_train; ++i) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double diff = test(t, j) - train(i, j);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    out.predicted[static_cast<std::size_t>(t)] = train_labels[static_cast<std::size_t>(arg)];
  }
  return out;
}

PredictionResult knn1_predict(const Matrix& train, const Labels& train_labels, const Matrix& test,
                              const Labels& truth) {
  PredictionResult out = knn1_predict(train, train_labels, test);
  out.accuracy = accuracy(out.predicted, truth);
  return out;
}

double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw std::invalid_argument("accuracy of an empty label vector");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Matrix pca_basis(const Matrix& centered, Eigen::Index k) {
  const Eigen::Index d = centered.cols();
  if (k < 1 || k > d) {
    throw std::invalid_argument("PCA dimension k = " + std::to_string(k) + " must lie in [1, " +
                                std::to_string(d) + "]");
  }
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(centered.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("PCA eigensolver did not converge");
  Matrix basis(d, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    basis.col(i) = eig.eigenvectors().col(d - 1 - i);
    Eigen::Index at = 0;
    basis.col(i).cwiseAbs().maxCoeff(&at);
    if (basis(at, i) < 0) basis.col(i) = -basis.col(i);
  }
  return basis;
}

std::pair<Matrix, Matrix> pca_fit_transform(const Matrix& source, const Matrix& target,
                                            Eigen::Index k, PcaMode mode) {
  if (source.cols() != target.cols()) throw DimensionError("PCA: dimension mismatch");
  if (k > source.cols()) {
    throw std::invalid_argument("PCA dimension k = " + std::to_string(k) +
                                " exceeds feature dimension " + std::to_string(source.cols()));
  }
  if (mode == PcaMode::kPerDomain) {
    const Matrix cs = source.rowwise() - source.colwise().mean();
    const Matrix ct = target.rowwise() - target.colwise().mean();
    return {cs * pca_basis(cs, k), ct * pca_basis(ct, k)};
  }
  Matrix pooled(source.rows() + target.rows(), source.cols());
  pooled << source, target;
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  const Matrix basis = pca_basis(pooled.rowwise() - mean, k);
  return {(source.rowwise() - mean) * basis, (target.rowwise() - mean) * basis};
}

PredictionResult no_adaptation_predict(const DomainPair& pair) {
  const Matrix& train = pair.source.features();
  const Labels& labels = pair.source.require_labels();
  if (pair.target.has_labels()) {
    return knn1_predict(train, labels, pair.target.features(), *pair.target.labels());
  }
  return knn1_predict(train, labels, pair.target.features());
}

}  // namespace tlr
