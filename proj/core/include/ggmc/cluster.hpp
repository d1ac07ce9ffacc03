#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ggmc/factors.hpp"
#include "ggmc/pcor.hpp"

namespace ggmc {

// Cluster ids are 0-based internally; excluded nodes carry kUnassigned.
inline constexpr int kUnassigned = -1;
using Labels = std::vector<int>;

enum class InitMethod { RandomLabels, FarthestFirst };

struct KMeansConfig {
  int k = 2;
  std::uint64_t seed = 0;
  int max_iters = 100;
  InitMethod init = InitMethod::RandomLabels;
  // Keep every iteration's labels and minimum assignment margin.
  bool record_history = false;
};

struct ClusterState {
  Matrix centers;           // n x K (dense: d x K), c_k as columns
  Matrix weighted_centers;  // c_k .* z; empty for dense runs
  Labels labels;
  int iterations = 0;
  std::size_t n_change = 0;
  bool converged = false;
  std::vector<std::size_t> n_change_history;
  std::vector<Labels> label_history;
  std::vector<double> min_margin_history;
  std::size_t reseeds = 0;
  // Columns handled explicitly because the sign test was active.
  std::size_t sign_test_fallbacks = 0;
};

struct Assignment {
  Labels labels;
  // Best score per node. Implicit: ||c||^2 - 2 c^T p (the ||p||^2 term is
  // dropped); dense: the full squared distance.
  Vector best;
  // Smallest gap between the best and second-best score over all nodes.
  double min_margin = 0.0;
};

// Uniform labels from a seeded generator, every cluster nonempty. Nodes
// flagged in `excluded` get kUnassigned. Throws InvalidArgument when fewer
// than k nodes are eligible.
Labels init_labels(Index n, int k, std::uint64_t seed,
                   const std::vector<bool>& excluded = {});

// K x n matrix of c_k^T p_j from (C_z^T A^+) A_zeta minus the diagonal
// correction. Zero columns at excluded nodes.
Matrix cross_terms(const FactorModel& f, const ColumnScalings& scal,
                   const Matrix& centers);

// Nearest center per node, argmin_k ||c_k||^2 - 2 c_k^T p_j, ties to the
// lowest cluster index.
Assignment assign_labels(const FactorModel& f, const ColumnScalings& scal,
                         const Matrix& centers);

// Mean of member columns of P for every cluster; empty clusters get a zero
// center.
Matrix update_centers(const FactorModel& f, const ColumnScalings& scal,
                      const Labels& labels, int k);

// ||p_j||^2 for every node without forming the columns; 0 at excluded nodes.
Vector column_norms_sq(const FactorModel& f, const ColumnScalings& scal);

// Lloyd iterations over the implicit columns of P. Reports non-convergence
// through ClusterState::converged.
ClusterState kmeans_implicit(const FactorModel& f, const ColumnScalings& scal,
                             const KMeansConfig& cfg);

// Lloyd iterations over the columns of `points` (d x n) with the same init,
// tie-breaking, reseeding and stopping rules as kmeans_implicit.
ClusterState kmeans_dense(const Matrix& points, const KMeansConfig& cfg,
                          const std::vector<bool>& excluded = {});

// Sum of squared distances from each point to its cluster mean.
double kmeans_objective(const Matrix& points, const Labels& labels, int k);

}  // namespace ggmc
