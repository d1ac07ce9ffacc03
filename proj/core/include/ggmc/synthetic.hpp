#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "ggmc/cluster.hpp"
#include "ggmc/data.hpp"

namespace ggmc {

// Tridiagonal precision: unit diagonal, -rho between neighbours, so the
// population partial correlation of adjacent variables is rho.
struct ChainModel {
  double rho = 0.4;
};

// `blocks` contiguous equal-size groups. Variables share a latent factor with
// loading sqrt(within) inside their block and sqrt(between) across all
// blocks, giving marginal correlation `within` inside a block and `between`
// across blocks. between = 0 makes the precision block-diagonal.
struct BlockModel {
  int blocks = 5;
  double within = 0.3;
  double between = 0.0;
};

using SyntheticModel = std::variant<ChainModel, BlockModel>;

// "chain:RHO" or "blocks:B,WITHIN,BETWEEN".
SyntheticModel parse_model(std::string_view text);
std::string to_string(const SyntheticModel& model);

// m samples (rows) of n variables from N(0, Theta^{-1}).
// Throws NotPositiveDefinite, InvalidArgument.
Matrix generate_synthetic(Index n, Index m, const SyntheticModel& model,
                          std::uint64_t seed);

// Population covariance, dense; for small-n checks.
Matrix population_covariance(Index n, const SyntheticModel& model);

// Block id of every variable under a BlockModel.
Labels block_membership(Index n, int blocks);

// Moving average of width 2w+1 along the variable index of every row, with
// reflection at the ends. No re-standardization.
Matrix smooth_rows(const Matrix& values, int half_width);

// smooth_rows followed by standardize.
DataMatrix smooth(const DataMatrix& data, int half_width);

}  // namespace ggmc
