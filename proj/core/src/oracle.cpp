#include "ggmc/oracle.hpp"

#include <cmath>
#include <string>

#include "ggmc/error.hpp"

namespace ggmc::oracle {

namespace {

Matrix drop_columns(const Matrix& a, Index i, Index j) {
  Matrix out(a.rows(), a.cols() - (i == j ? 1 : 2));
  Index c = 0;
  for (Index k = 0; k < a.cols(); ++k)
    if (k != i && k != j) out.col(c++) = a.col(k);
  return out;
}

double pearson(const Vector& x, const Vector& y) {
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
}

}  // namespace

double pcor_pairwise_residual(const DataMatrix& data, Index i, Index j) {
  const Matrix& a = data.values();
  const Index n = a.cols();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw Error(ErrorCode::InvalidArgument, "need two distinct valid nodes");
  Vector ri = a.col(i);
  Vector rj = a.col(j);
  if (n > 2) {
    const Matrix rest = drop_columns(a, i, j);
    if (rest.cols() >= a.rows())
      throw Error(ErrorCode::RankDeficient, "more regressors than samples");
    Eigen::ColPivHouseholderQR<Matrix> qr(rest);
    if (qr.rank() < rest.cols())
      throw Error(ErrorCode::RankDeficient, "remaining columns are collinear");
    ri -= rest * qr.solve(ri);
    rj -= rest * qr.solve(rj);
  }
  return pearson(ri, rj);
}

Matrix pcor_precision(const DataMatrix& data) {
  const Matrix& a = data.values();
  const Index n = a.cols();
  if (a.rows() <= n)
    throw Error(ErrorCode::SingularCovariance, "need more samples than variables");
  const Matrix cov = a.transpose() * a;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularCovariance, "covariance is not positive definite");
  Matrix theta = llt.solve(Matrix::Identity(n, n));
  theta = 0.5 * (theta + theta.transpose());
  Matrix rho(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r)
      rho(r, c) = r == c ? 0.0 : -theta(r, c) / std::sqrt(theta(r, r) * theta(c, c));
  return rho;
}

Vector ridge_neighborhood(const DataMatrix& data, Index i, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  Matrix x = data.values();
  x.col(i).setZero();
  Matrix normal = x.transpose() * x;
  normal.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SolveFailure, "ridge normal equations are not positive definite");
  Vector beta = llt.solve(x.transpose() * data.column(i));
  if (!beta.allFinite()) throw Error(ErrorCode::SolveFailure, "ridge solve produced NaN");
  beta(i) = 0.0;
  return beta;
}

Matrix dense_R(const FactorModel& f, Index dense_limit) {
  const Index n = f.variables();
  if (n > dense_limit)
    throw Error(ErrorCode::TooLargeForDense,
                std::to_string(n) + " nodes exceed the dense limit of " +
                    std::to_string(dense_limit));
  Matrix r(n, n);
  for (Index j = 0; j < n; ++j) r.col(j) = apply_pinv(f, f.data().column(j));
  return r;
}

DenseGraph ridge_graph(const DataMatrix& data, double lambda, EstimatorKind kind) {
  const Matrix& a = data.values();
  const Index n = a.cols();
  DenseGraph g;
  g.B.resize(n, n);
  g.residual_norms.resize(n);
  g.sigma_prec.resize(n);
  for (Index i = 0; i < n; ++i) {
    g.B.col(i) = ridge_neighborhood(data, i, lambda);
    const double d = (a * g.B.col(i) - a.col(i)).norm();
    g.residual_norms(i) = d;
    g.sigma_prec(i) = 1.0 / (d * d);
  }

  Matrix normal = a.transpose() * a;
  normal.diagonal().array() += lambda;
  g.R = normal.llt().solve(a.transpose() * a);

  g.P = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      // B(j, i) is the coefficient of node j when regressing node i.
      const double bji = g.B(j, i);
      const double bij = g.B(i, j);
      if (kind == EstimatorKind::Asymmetric) {
        g.P(j, i) = g.residual_norms(j) * bji / g.residual_norms(i);
      } else if ((bji > 0 && bij > 0) || (bji < 0 && bij < 0)) {
        g.P(j, i) = (bji > 0 ? 1.0 : -1.0) * std::sqrt(bji * bij);
      }
    }
  }
  return g;
}

}  // namespace ggmc::oracle
