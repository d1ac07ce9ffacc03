#pragma once

#include <atomic>
#include <cstddef>
#include <string_view>

#include "ggmc/data.hpp"
#include "ggmc/factors.hpp"
#include "ggmc/pcor.hpp"

namespace ggmc {

enum class Geometry {
  Raw,                 // ||a_i - a_j||
  Correlation,         // ||A^T a_i - A^T a_j||
  Resolution,          // ||A^+ (a_i - a_j)||
  PartialCorrelation,  // ||p_i - p_j||
};

struct DistanceKind {
  Geometry geometry = Geometry::PartialCorrelation;
  EstimatorKind estimator = EstimatorKind::SymmetricGeometricMean;
};

std::string_view to_string(Geometry g) noexcept;

double raw_dist_pair(const DataMatrix& data, Index i, Index j);

// Square root of the sample Gram matrix A A^T (m x m), so that
// ||A^T x|| = ||root * x|| without ever forming A^T A.
class GramFactor {
 public:
  explicit GramFactor(const DataMatrix& data);
  const Matrix& root() const noexcept { return root_; }

 private:
  Matrix root_;
};

double corr_dist_pair(const GramFactor& gram, const DataMatrix& data, Index i,
                      Index j);

// m x n matrix whose column distances are the correlation distances.
Matrix correlation_embedding(const GramFactor& gram, const DataMatrix& data);

double rdist_pair(const FactorModel& f, Index i, Index j);

// Rows of V (n x r); Euclidean row distances equal rdist_pair.
// Throws UnsupportedForRidge.
Matrix spectral_embedding(const FactorModel& f);

struct DistanceStats {
  // Pairs evaluated from explicit columns because the sign test was active.
  std::atomic<std::size_t> fallbacks{0};
};

// ||z .* A^+(zeta_i a_i - zeta_j a_j) - (R_ii z_i zeta_i e_i - R_jj z_j zeta_j e_j)||.
// Throws DegenerateNode for excluded nodes.
double pdist_pair(const FactorModel& f, const ColumnScalings& scal, Index i,
                  Index j, DistanceStats* stats = nullptr);

}  // namespace ggmc
