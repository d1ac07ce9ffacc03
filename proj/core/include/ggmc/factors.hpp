#pragma once

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "ggmc/data.hpp"

namespace ggmc {

struct TruncatedSvd {
  double keep_fraction;  // fraction of the nonzero singular values retained
};

struct Ridge {
  double lambda;
};

class Regularization {
 public:
  static Regularization truncated_svd(double keep_fraction);
  static Regularization ridge(double lambda);

  bool is_truncated() const noexcept {
    return std::holds_alternative<TruncatedSvd>(kind_);
  }
  bool is_ridge() const noexcept { return std::holds_alternative<Ridge>(kind_); }
  double keep_fraction() const;
  double lambda() const;

 private:
  explicit Regularization(std::variant<TruncatedSvd, Ridge> kind)
      : kind_(kind) {}
  std::variant<TruncatedSvd, Ridge> kind_;
};

// |1 - R_ii| below this marks node i as fully resolved.
inline constexpr double kDegenerateEps = 1e-8;

// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-12;

struct FactorOptions {
  // Permit data that has not been standardized.
  bool allow_unstandardized = false;
};

// Regularized SVD factors of a data matrix A (m x n):
//   A^+ = V diag(pinv_gain) U^T,   R = A^+ A = V diag(resolution_gain) V^T.
// Truncated SVD keeps the leading r triplets with pinv_gain = 1/sigma; ridge
// keeps every nonzero triplet with pinv_gain = sigma / (sigma^2 + lambda).
// Per-node diag(R), residual norms d and s = 1/(1 - R_ii) are precomputed.
// Immutable after construction.
class FactorModel {
 public:
  const DataMatrix& data() const noexcept { return *data_; }
  const std::shared_ptr<const DataMatrix>& data_ptr() const noexcept {
    return data_;
  }
  const Regularization& regularization() const noexcept { return reg_; }

  Index samples() const noexcept { return U_.rows(); }
  Index variables() const noexcept { return V_.rows(); }
  // Number of retained singular triplets.
  Index rank() const noexcept { return sigma_.size(); }
  // Number of singular values above the rank tolerance.
  Index numerical_rank() const noexcept { return numerical_rank_; }

  const Matrix& U() const noexcept { return U_; }
  const Vector& sigma() const noexcept { return sigma_; }
  const Matrix& V() const noexcept { return V_; }
  const Vector& pinv_gain() const noexcept { return pinv_gain_; }
  const Vector& resolution_gain() const noexcept { return resolution_gain_; }

  const Vector& diag_resolution() const noexcept { return diag_r_; }
  // 1 - R_ii, accumulated without forming R_ii first where possible.
  const Vector& resolution_complement() const noexcept { return complement_; }
  // NaN at degenerate nodes.
  const Vector& residual_norms() const noexcept { return dvec_; }
  const Vector& s() const noexcept { return svec_; }

  const std::vector<std::size_t>& degenerate() const noexcept {
    return degenerate_;
  }
  bool is_degenerate(Index i) const { return degenerate_mask_[i]; }

  // Throws DegenerateNode for degenerate i.
  double residual_norm(Index i) const;
  double s(Index i) const;

 private:
  friend FactorModel build_factors(std::shared_ptr<const DataMatrix>,
                                   const Regularization&, const FactorOptions&);

  explicit FactorModel(Regularization reg) : reg_(reg) {}

  std::shared_ptr<const DataMatrix> data_;
  Regularization reg_;
  Matrix U_;
  Vector sigma_;
  Matrix V_;
  Vector pinv_gain_;
  Vector resolution_gain_;
  Index numerical_rank_ = 0;
  Vector diag_r_;
  Vector complement_;
  Vector dvec_;
  Vector svec_;
  std::vector<std::size_t> degenerate_;
  std::vector<bool> degenerate_mask_;
};

// Throws NotStandardized, RankCollapse, DecompositionFailure, InvalidArgument.
FactorModel build_factors(std::shared_ptr<const DataMatrix> data,
                          const Regularization& reg,
                          const FactorOptions& options = {});
FactorModel build_factors(const DataMatrix& data, const Regularization& reg,
                          const FactorOptions& options = {});

// A^+ x in O((m + n) r).
Vector apply_pinv(const FactorModel& f, const Eigen::Ref<const Vector>& x);
// A^+ X, column by column.
Matrix apply_pinv_batch(const FactorModel& f, const Eigen::Ref<const Matrix>& x);

// diag(A^+ A) from the row norms of V; R is never formed.
Vector resolution_diag(const FactorModel& f);

// d_i = |s_i| * ||A (A^+ a_i - e_i)||, NaN at degenerate nodes.
Vector residual_norms(const FactorModel& f, const DataMatrix& data);

}  // namespace ggmc
