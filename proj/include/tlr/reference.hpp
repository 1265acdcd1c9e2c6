#pragma once

#include "tlr/kernel.hpp"
#include "tlr/types.hpp"

// Single-threaded versions of the parallel loops. Tests and the benchmark
// compare the OpenMP kernels against these.
namespace tlr::reference {

Matrix gram(const Matrix& x, const Matrix& y, const KernelSpec& spec);

Labels knn1(const Matrix& train, const Labels& train_labels, const Matrix& test);

/// All pairwise distances, sorted; the median is taken from this list.
double median_bandwidth(const Matrix& source, const Matrix& target);

}  // namespace tlr::reference
