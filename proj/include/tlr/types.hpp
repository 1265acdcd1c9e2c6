#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tlr {

// Row-major keeps one sample per contiguous row, which is what the Gram and
// distance loops walk.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Label = std::int32_t;
using Labels = std::vector<Label>;
using Seed = std::uint64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}

  /// 1-based line of the offending record.
  std::size_t row() const noexcept { return row_; }
  /// 1-based field index; 0 when the error concerns the whole row.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlr
