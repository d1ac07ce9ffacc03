#pragma once

#include <cstddef>
#include <vector>

#include "ggmc/factors.hpp"

namespace ggmc {

enum class EstimatorKind {
  Asymmetric,              // P = D_d B D_d^{-1}
  SymmetricGeometricMean,  // P_ij = sign(B_ij) sqrt(B_ij B_ji), sign tested
};

inline constexpr Index kDefaultDenseLimit = 2000;

// Column generator p_i = z .* (A^+ zeta_i a_i - R_ii zeta_i e_i).
// Excluded nodes (R_ii ~ 1, or zero residual for the asymmetric estimator)
// carry z = zeta = 0, so they neither produce columns nor appear in others.
struct ColumnScalings {
  EstimatorKind kind = EstimatorKind::SymmetricGeometricMean;
  Vector z;
  Vector zeta;
  Vector diag_r;
  std::vector<bool> excluded;
  std::vector<std::size_t> excluded_nodes;
  // True when s has entries of both signs among the included nodes, i.e. the
  // sign test can zero entries the factor form does not see.
  bool mixed_signs = false;

  Index size() const noexcept { return z.size(); }
  bool is_excluded(Index i) const { return excluded[i]; }
};

// Throws MissingResiduals when the asymmetric estimator lacks d.
ColumnScalings scalings(const FactorModel& f, EstimatorKind kind);

// beta_i = s_i (A^+ a_i - R_ii e_i) with (beta_i)_i = 0. Throws DegenerateNode.
Vector beta_column(const FactorModel& f, Index i);

// Throws DegenerateNode when i is excluded.
Vector pcor_column(const FactorModel& f, const ColumnScalings& scal, Index i);

struct DensePcor {
  Matrix P;
  std::vector<std::size_t> zeroed_nodes;
  std::size_t sign_test_zeros = 0;  // off-diagonal entries zeroed by the sign test
};

// Materializes P through R = V diag(h) V^T and B = R_{-d} D_s.
// Throws TooLargeForDense when n > dense_limit.
DensePcor dense_P(const FactorModel& f, EstimatorKind kind,
                  Index dense_limit = kDefaultDenseLimit);

}  // namespace ggmc
