#pragma once

#include <optional>

#include "ggmc/data.hpp"
#include "ggmc/factors.hpp"
#include "ggmc/pcor.hpp"

// Slow dense reference computations. Nothing here goes through the factor
// shortcuts except dense_R, which applies A^+ column by column.
namespace ggmc::oracle {

struct DenseGraph {
  Matrix R;
  Matrix B;  // beta_i as columns, zero diagonal
  Matrix P;  // zero diagonal
  std::optional<Matrix> theta;
  Vector sigma_prec;  // 1 / ||eps_i||^2
  Vector residual_norms;
};

// Pearson correlation of the least-squares residuals of a_i and a_j after
// regressing both on every other column. Throws RankDeficient.
double pcor_pairwise_residual(const DataMatrix& data, Index i, Index j);

// rho_ij = -Theta_ij / sqrt(Theta_ii Theta_jj) with Theta = (A^T A)^{-1};
// zero diagonal. Throws SingularCovariance.
Matrix pcor_precision(const DataMatrix& data);

// argmin ||a_i - A_{-i} beta||^2 + lambda ||beta||^2 by a dense solve.
// Throws SolveFailure, InvalidArgument for lambda <= 0.
Vector ridge_neighborhood(const DataMatrix& data, Index i, double lambda);

// A^+ A formed one column at a time. Throws TooLargeForDense.
Matrix dense_R(const FactorModel& f, Index dense_limit = kDefaultDenseLimit);

// Every neighborhood regression solved directly, residual norms taken from
// the explicit residuals, P assembled entrywise.
DenseGraph ridge_graph(const DataMatrix& data, double lambda, EstimatorKind kind);

}  // namespace ggmc::oracle
