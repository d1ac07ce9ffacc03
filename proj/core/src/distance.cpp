#include "ggmc/distance.hpp"

#include <string>

#include "ggmc/error.hpp"

namespace ggmc {

namespace {

void check_pair(Index n, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw Error(ErrorCode::DimensionMismatch,
                "node pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") out of range for " + std::to_string(n) + " nodes");
}

}  // namespace

std::string_view to_string(Geometry g) noexcept {
  switch (g) {
    case Geometry::Raw: return "raw";
    case Geometry::Correlation: return "corr";
    case Geometry::Resolution: return "spectral";
    case Geometry::PartialCorrelation: return "pcor";
  }
  return "unknown";
}

double raw_dist_pair(const DataMatrix& data, Index i, Index j) {
  check_pair(data.variables(), i, j);
  return (data.column(i) - data.column(j)).norm();
}

GramFactor::GramFactor(const DataMatrix& data) {
  const Matrix& a = data.values();
  Matrix gram = Matrix::Zero(a.rows(), a.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::DecompositionFailure, "Gram eigendecomposition failed");
  const Vector scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  root_ = scale.asDiagonal() * eig.eigenvectors().transpose();
}

double corr_dist_pair(const GramFactor& gram, const DataMatrix& data, Index i,
                      Index j) {
  check_pair(data.variables(), i, j);
  return (gram.root() * (data.column(i) - data.column(j))).norm();
}

Matrix correlation_embedding(const GramFactor& gram, const DataMatrix& data) {
  return gram.root() * data.values();
}

double rdist_pair(const FactorModel& f, Index i, Index j) {
  check_pair(f.variables(), i, j);
  const Vector diff = f.data().column(i) - f.data().column(j);
  return apply_pinv(f, diff).norm();
}

Matrix spectral_embedding(const FactorModel& f) {
  if (!f.regularization().is_truncated())
    throw Error(ErrorCode::UnsupportedForRidge,
                "the spectral embedding requires truncated-SVD regularization");
  return f.V();
}

double pdist_pair(const FactorModel& f, const ColumnScalings& scal, Index i,
                  Index j, DistanceStats* stats) {
  check_pair(f.variables(), i, j);
  for (Index node : {i, j})
    if (scal.is_excluded(node))
      throw Error(ErrorCode::DegenerateNode,
                  "node " + std::to_string(node) + " is excluded from the estimator",
                  static_cast<std::size_t>(node));

  if (scal.kind == EstimatorKind::SymmetricGeometricMean && scal.mixed_signs) {
    if (stats) stats->fallbacks.fetch_add(1, std::memory_order_relaxed);
    return (pcor_column(f, scal, i) - pcor_column(f, scal, j)).norm();
  }

  const Vector x = scal.zeta(i) * f.data().column(i) - scal.zeta(j) * f.data().column(j);
  Vector y = apply_pinv(f, x);
  y.array() *= scal.z.array();
  y(i) -= scal.diag_r(i) * scal.z(i) * scal.zeta(i);
  y(j) += scal.diag_r(j) * scal.z(j) * scal.zeta(j);
  return y.norm();
}

}  // namespace ggmc
