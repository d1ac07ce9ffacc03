#pragma once

#include <vector>

#include "ggmc/cluster.hpp"

namespace ggmc {

// Maximum-weight perfect matching on a square score matrix (Hungarian
// method). Returns, for each row, the matched column.
std::vector<int> max_weight_matching(const Matrix& score);

// Percentage of nodes whose clusters differ once the clusters of `b` are
// optimally matched to those of `a` on the confusion matrix. Nodes
// unassigned in either labelling are skipped. Throws LengthMismatch.
double disagreement_percent(const Labels& a, const Labels& b);

}  // namespace ggmc
