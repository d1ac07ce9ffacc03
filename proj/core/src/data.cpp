#include "ggmc/data.hpp"

#include <cmath>
#include <string>

#include "ggmc/error.hpp"

namespace ggmc {

DataMatrix DataMatrix::unstandardized(Matrix values) {
  if (!values.allFinite())
    throw Error(ErrorCode::NonFiniteInput, "data contains NaN or Inf");
  return DataMatrix(std::move(values), false);
}

DataMatrix standardize(Matrix raw) {
  const Index m = raw.rows();
  const Index n = raw.cols();
  if (m < 2 || n < 2)
    throw Error(ErrorCode::InvalidArgument,
                "need at least 2 samples and 2 variables, got " +
                    std::to_string(m) + "x" + std::to_string(n));
  if (!raw.allFinite())
    throw Error(ErrorCode::NonFiniteInput, "data contains NaN or Inf");

  for (Index i = 0; i < n; ++i) {
    auto col = raw.col(i);
    const double first = col(0);
    if ((col.array() == first).all())
      throw Error(ErrorCode::ZeroVarianceColumn,
                  "column " + std::to_string(i) + " is constant",
                  static_cast<std::size_t>(i));
    // Second centering pass removes the rounding left by the first.
    col.array() -= col.mean();
    col.array() -= col.mean();
    const double norm = col.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorCode::ZeroVarianceColumn,
                  "column " + std::to_string(i) + " has no variance",
                  static_cast<std::size_t>(i));
    col /= norm;
  }
  return DataMatrix(std::move(raw), true);
}

}  // namespace ggmc
