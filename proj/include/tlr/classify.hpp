#pragma once

#include <optional>
#include <utility>

#include "tlr/dataset.hpp"
#include "tlr/types.hpp"

namespace tlr {

struct PredictionResult {
  Labels predicted;
  std::optional<double> accuracy;
};

/// 1-NN under Euclidean distance; ties go to the lowest training index.
/// Squared distances are summed coordinate by coordinate in ascending order.
PredictionResult knn1_predict(const Matrix& train, const Labels& train_labels, const Matrix& test);
PredictionResult knn1_predict(const Matrix& train, const Labels& train_labels, const Matrix& test,
                              const Labels& truth);

double accuracy(const Labels& predicted, const Labels& truth);

enum class PcaMode {
  /// Each domain is centered and projected on its own leading directions.
  kPerDomain,
  /// One basis fit on the pooled, jointly centered rows.
  kPooled,
};

/// Leading k principal directions as columns (d x k), descending variance,
/// largest-magnitude entry of each column positive.
Matrix pca_basis(const Matrix& centered, Eigen::Index k);

std::pair<Matrix, Matrix> pca_fit_transform(const Matrix& source, const Matrix& target,
                                            Eigen::Index k, PcaMode mode = PcaMode::kPerDomain);

/// 1-NN on the features as given.
PredictionResult no_adaptation_predict(const DomainPair& pair);

}  // namespace tlr
