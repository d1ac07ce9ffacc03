#pragma once

#include <Eigen/Dense>

namespace ggmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Samples in rows, variables (graph nodes) in columns.
class DataMatrix {
 public:
  DataMatrix() = default;

  // Wraps an arbitrary matrix without centering or scaling. Factor building
  // refuses such data unless explicitly allowed; intended for unit tests on
  // hand-built matrices.
  static DataMatrix unstandardized(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index samples() const noexcept { return values_.rows(); }
  Index variables() const noexcept { return values_.cols(); }
  bool standardized() const noexcept { return standardized_; }

  auto column(Index i) const { return values_.col(i); }

 private:
  friend DataMatrix standardize(Matrix raw);
  DataMatrix(Matrix values, bool standardized)
      : values_(std::move(values)), standardized_(standardized) {}

  Matrix values_;
  bool standardized_ = false;
};

// Centers every column and scales it to unit Euclidean norm. Takes the matrix
// by value so callers can move large inputs in without a copy.
// Throws ZeroVarianceColumn, NonFiniteInput, InvalidArgument (m < 2 or n < 2).
DataMatrix standardize(Matrix raw);

}  // namespace ggmc
