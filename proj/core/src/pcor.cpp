#include "ggmc/pcor.hpp"

#include <cmath>
#include <string>

#include "ggmc/error.hpp"

namespace ggmc {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_included(const ColumnScalings& scal, Index i) {
  if (i < 0 || i >= scal.size())
    throw Error(ErrorCode::DimensionMismatch, "node index " + std::to_string(i) + " out of range");
  if (scal.excluded[i])
    throw Error(ErrorCode::DegenerateNode,
                "node " + std::to_string(i) + " is excluded from the estimator",
                static_cast<std::size_t>(i));
}

}  // namespace

ColumnScalings scalings(const FactorModel& f, EstimatorKind kind) {
  const Index n = f.variables();
  ColumnScalings out;
  out.kind = kind;
  out.z = Vector::Zero(n);
  out.zeta = Vector::Zero(n);
  out.diag_r = f.diag_resolution();
  out.excluded.assign(static_cast<std::size_t>(n), false);

  if (kind == EstimatorKind::Asymmetric && f.residual_norms().size() != n)
    throw Error(ErrorCode::MissingResiduals, "asymmetric estimator needs residual norms");

  double first_sign = 0.0;
  for (Index i = 0; i < n; ++i) {
    bool excluded = f.is_degenerate(i);
    if (!excluded) {
      const double s = f.s()(i);
      if (kind == EstimatorKind::Asymmetric) {
        const double d = f.residual_norms()(i);
        const double zeta = s / d;
        if (!std::isfinite(d) || !std::isfinite(zeta)) {
          excluded = true;
        } else {
          out.z(i) = d;
          out.zeta(i) = zeta;
        }
      } else {
        const double root = std::sqrt(std::abs(s));
        out.z(i) = root;
        out.zeta(i) = sign_of(s) * root;
      }
      if (!excluded) {
        const double sg = sign_of(s);
        if (first_sign == 0.0) first_sign = sg;
        else if (sg != first_sign) out.mixed_signs = true;
      }
    }
    if (excluded) {
      out.z(i) = 0.0;
      out.zeta(i) = 0.0;
      out.excluded[i] = true;
      out.excluded_nodes.push_back(static_cast<std::size_t>(i));
    }
  }
  if (kind == EstimatorKind::Asymmetric) out.mixed_signs = false;
  return out;
}

Vector beta_column(const FactorModel& f, Index i) {
  if (i < 0 || i >= f.variables())
    throw Error(ErrorCode::DimensionMismatch, "node index " + std::to_string(i) + " out of range");
  const double s = f.s(i);
  Vector beta = apply_pinv(f, f.data().column(i));
  beta(i) -= f.diag_resolution()(i);
  beta *= s;
  beta(i) = 0.0;
  return beta;
}

Vector pcor_column(const FactorModel& f, const ColumnScalings& scal, Index i) {
  require_included(scal, i);
  const double zeta = scal.zeta(i);
  Vector p = apply_pinv(f, f.data().column(i));
  p *= zeta;
  p(i) -= scal.diag_r(i) * zeta;
  p.array() *= scal.z.array();
  p(i) = 0.0;
  if (scal.kind == EstimatorKind::SymmetricGeometricMean && scal.mixed_signs) {
    const double own = sign_of(zeta);
    for (Index j = 0; j < p.size(); ++j)
      if (sign_of(scal.zeta(j)) != own) p(j) = 0.0;
  }
  return p;
}

DensePcor dense_P(const FactorModel& f, EstimatorKind kind, Index dense_limit) {
  const Index n = f.variables();
  if (n > dense_limit)
    throw Error(ErrorCode::TooLargeForDense,
                std::to_string(n) + " nodes exceed the dense limit of " +
                    std::to_string(dense_limit));

  const Matrix r = f.V() * f.resolution_gain().asDiagonal() * f.V().transpose();
  std::vector<bool> zeroed(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < n; ++j) {
    if (f.is_degenerate(j)) zeroed[j] = true;
    if (kind == EstimatorKind::Asymmetric) {
      const double d = f.residual_norms()(j);
      if (!std::isfinite(d) || d == 0.0) zeroed[j] = true;
    }
  }

  // B = R_{-d} D_s: column j is beta_j.
  Matrix b = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    if (zeroed[j]) continue;
    b.col(j) = r.col(j) * f.s()(j);
    b(j, j) = 0.0;
  }

  DensePcor out;
  out.P = Matrix::Zero(n, n);
  if (kind == EstimatorKind::Asymmetric) {
    const Vector& d = f.residual_norms();
    for (Index j = 0; j < n; ++j) {
      if (zeroed[j]) continue;
      for (Index i = 0; i < n; ++i)
        if (!zeroed[i] && i != j) out.P(i, j) = d(i) * b(i, j) / d(j);
    }
  } else {
    for (Index j = 0; j < n; ++j) {
      if (zeroed[j]) continue;
      for (Index i = j + 1; i < n; ++i) {
        if (zeroed[i]) continue;
        const double bij = b(i, j);
        const double bji = b(j, i);
        const double si = sign_of(bij);
        if (si != sign_of(bji)) {
          if (si != 0.0 && sign_of(bji) != 0.0) ++out.sign_test_zeros;
          continue;
        }
        const double v = si * std::sqrt(bij * bji);
        out.P(i, j) = v;
        out.P(j, i) = v;
      }
    }
  }
  for (Index j = 0; j < n; ++j)
    if (zeroed[j]) out.zeroed_nodes.push_back(static_cast<std::size_t>(j));
  return out;
}

}  // namespace ggmc
