#include "ggmc/factors.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ggmc/error.hpp"
#include "ggmc/parallel.hpp"

namespace ggmc {

Regularization Regularization::truncated_svd(double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "keep_fraction must lie in (0, 1], got " +
                    std::to_string(keep_fraction));
  return Regularization(TruncatedSvd{keep_fraction});
}

Regularization Regularization::ridge(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::InvalidArgument,
                "ridge lambda must be positive, got " + std::to_string(lambda));
  return Regularization(Ridge{lambda});
}

double Regularization::keep_fraction() const {
  if (const auto* t = std::get_if<TruncatedSvd>(&kind_)) return t->keep_fraction;
  throw Error(ErrorCode::InvalidArgument, "ridge regularization has no keep_fraction");
}

double Regularization::lambda() const {
  if (const auto* r = std::get_if<Ridge>(&kind_)) return r->lambda;
  throw Error(ErrorCode::InvalidArgument, "truncated SVD has no lambda");
}

double FactorModel::residual_norm(Index i) const {
  if (degenerate_mask_[i])
    throw Error(ErrorCode::DegenerateNode,
                "node " + std::to_string(i) + " has R_ii ~ 1; residual undefined",
                static_cast<std::size_t>(i));
  return dvec_(i);
}

double FactorModel::s(Index i) const {
  if (degenerate_mask_[i])
    throw Error(ErrorCode::DegenerateNode,
                "node " + std::to_string(i) + " has R_ii ~ 1; s undefined",
                static_cast<std::size_t>(i));
  return svec_(i);
}

namespace {

struct ThinSvd {
  Matrix U;
  Vector sigma;
  Matrix V;
};

// SVD of A via a Householder QR of the taller orientation followed by a
// divide-and-conquer SVD of the small triangular factor. All min(m, n)
// singular values are returned but only the leading `keep` columns of U and V
// are formed. Peak workspace is two copies of A.
ThinSvd thin_svd(const Matrix& a, Index keep) {
  const bool wide = a.rows() < a.cols();
  const Index p = std::min(a.rows(), a.cols());
  if (keep <= 0 || keep > p) keep = p;

  Matrix tall = wide ? Matrix(a.transpose()) : a;
  Eigen::HouseholderQR<Eigen::Ref<Matrix>> qr(tall);
  Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  Eigen::BDCSVD<Matrix> small(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (small.info() != Eigen::Success)
    throw Error(ErrorCode::DecompositionFailure, "SVD did not converge");

  Matrix q = Matrix::Identity(tall.rows(), p);
  q.applyOnTheLeft(qr.householderQ());
  // The QR workspace is no longer needed.
  tall.resize(0, 0);

  ThinSvd out;
  out.sigma = small.singularValues();
  Matrix rotated = q * small.matrixU().leftCols(keep);
  q.resize(0, 0);
  if (wide) {
    out.U = small.matrixV().leftCols(keep);
    out.V = std::move(rotated);
  } else {
    out.U = std::move(rotated);
    out.V = small.matrixV().leftCols(keep);
  }
  if (!out.U.allFinite() || !out.V.allFinite() || !out.sigma.allFinite())
    throw Error(ErrorCode::DecompositionFailure, "SVD produced non-finite factors");
  return out;
}

Index count_nonzero(const Vector& sigma) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double cutoff = kRankTolerance * sigma(0);
  Index q = 0;
  while (q < sigma.size() && sigma(q) >= cutoff) ++q;
  return q;
}

}  // namespace

FactorModel build_factors(std::shared_ptr<const DataMatrix> data,
                          const Regularization& reg,
                          const FactorOptions& options) {
  if (!data) throw Error(ErrorCode::InvalidArgument, "null data");
  if (!data->standardized() && !options.allow_unstandardized)
    throw Error(ErrorCode::NotStandardized,
                "standardize the data before building factors");
  const Matrix& a = data->values();
  const Index m = a.rows();
  const Index n = a.cols();
  const Index p = std::min(m, n);
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "empty data matrix");

  // Every singular value comes out of the small SVD, but only the leading
  // columns of U and V are rotated back; round(keep * q) never exceeds them.
  Index keep_cols = p;
  if (reg.is_truncated())
    keep_cols = std::min<Index>(
        p, static_cast<Index>(std::ceil(reg.keep_fraction() * static_cast<double>(p))) + 1);
  ThinSvd svd = thin_svd(a, keep_cols);
  const Index q = count_nonzero(svd.sigma);

  Index r = 0;
  if (reg.is_truncated()) {
    r = static_cast<Index>(std::llround(reg.keep_fraction() * static_cast<double>(q)));
    r = std::min(r, svd.U.cols());
  } else {
    r = q;
  }
  if (r <= 0)
    throw Error(ErrorCode::RankCollapse,
                "regularization retains no singular values (numerical rank " +
                    std::to_string(q) + ")");

  FactorModel f(reg);
  f.data_ = std::move(data);
  f.numerical_rank_ = q;
  f.U_ = svd.U.leftCols(r);
  f.V_ = svd.V.leftCols(r);
  f.sigma_ = svd.sigma.head(r);
  svd = {};

  if (reg.is_truncated()) {
    f.pinv_gain_ = f.sigma_.cwiseInverse();
    f.resolution_gain_ = Vector::Ones(r);
  } else {
    const double lambda = reg.lambda();
    const Vector sq = f.sigma_.cwiseAbs2();
    f.pinv_gain_ = f.sigma_.array() / (sq.array() + lambda);
    f.resolution_gain_ = sq.array() / (sq.array() + lambda);
  }

  f.diag_r_ = resolution_diag(f);
  f.complement_.resize(n);
  const Vector shrink = Vector::Ones(r) - f.resolution_gain_;
  const bool full_row_space = r == n;
  for (Index i = 0; i < n; ++i) {
    if (reg.is_truncated()) {
      f.complement_(i) = 1.0 - f.diag_r_(i);
    } else {
      // 1 - R_ii = sum_k V_ik^2 (1 - h_k) + (1 - sum_k V_ik^2); the second
      // term vanishes identically when V spans R^n.
      const auto row = f.V_.row(i);
      double c = row.cwiseAbs2().dot(shrink);
      if (!full_row_space) c += std::max(0.0, 1.0 - row.squaredNorm());
      f.complement_(i) = c;
    }
  }

  f.degenerate_mask_.assign(static_cast<std::size_t>(n), false);
  f.svec_.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(f.complement_(i)) < kDegenerateEps) {
      f.degenerate_mask_[i] = true;
      f.degenerate_.push_back(static_cast<std::size_t>(i));
      f.svec_(i) = std::numeric_limits<double>::quiet_NaN();
    } else {
      f.svec_(i) = 1.0 / f.complement_(i);
    }
  }
  f.dvec_ = residual_norms(f, f.data());
  return f;
}

FactorModel build_factors(const DataMatrix& data, const Regularization& reg,
                          const FactorOptions& options) {
  return build_factors(std::make_shared<const DataMatrix>(data), reg, options);
}

Vector apply_pinv(const FactorModel& f, const Eigen::Ref<const Vector>& x) {
  if (x.size() != f.samples())
    throw Error(ErrorCode::DimensionMismatch,
                "apply_pinv expects a length-" + std::to_string(f.samples()) +
                    " vector, got " + std::to_string(x.size()));
  const Vector coeff = f.pinv_gain().cwiseProduct(f.U().transpose() * x);
  return f.V() * coeff;
}

Matrix apply_pinv_batch(const FactorModel& f, const Eigen::Ref<const Matrix>& x) {
  if (x.rows() != f.samples())
    throw Error(ErrorCode::DimensionMismatch,
                "apply_pinv expects " + std::to_string(f.samples()) + " rows, got " +
                    std::to_string(x.rows()));
  const Matrix coeff = f.pinv_gain().asDiagonal() * (f.U().transpose() * x);
  return f.V() * coeff;
}

Vector resolution_diag(const FactorModel& f) {
  return f.V().cwiseAbs2() * f.resolution_gain();
}

Vector residual_norms(const FactorModel& f, const DataMatrix& data) {
  const Index n = f.variables();
  if (data.variables() != n || data.samples() != f.samples())
    throw Error(ErrorCode::DimensionMismatch, "data does not match factor model");
  Vector d(n);
  const Matrix& a = data.values();
  parallel_chunks(static_cast<std::size_t>(n), kDefaultGrain,
                  [&](std::size_t begin, std::size_t end) {
    Vector coeff(f.rank());
    Vector fitted(f.samples());
    for (auto i = static_cast<Index>(begin); i < static_cast<Index>(end); ++i) {
      if (f.is_degenerate(i)) {
        d(i) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      // A A^+ a_i = U diag(h) U^T a_i since V^T V = I on the kept triplets.
      coeff.noalias() = f.U().transpose() * a.col(i);
      coeff.array() *= f.resolution_gain().array();
      fitted.noalias() = f.U() * coeff;
      fitted -= a.col(i);
      d(i) = std::abs(1.0 / f.resolution_complement()(i)) * fitted.norm();
    }
  });
  return d;
}

}  // namespace ggmc
