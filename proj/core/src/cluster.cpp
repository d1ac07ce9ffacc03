#include "ggmc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "ggmc/error.hpp"
#include "ggmc/parallel.hpp"

namespace ggmc {

namespace {

// Column blocks for the K x n cross-term products. Fixed so that every
// product is evaluated identically for any worker count.
constexpr std::size_t kCrossGrain = 512;
// Coarser blocks for the center accumulation partial sums.
constexpr std::size_t kAccumGrain = 4096;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::min(bound - 1, static_cast<std::size_t>(u * static_cast<double>(bound)));
}

bool is_excluded(const std::vector<bool>& mask, Index i) {
  return !mask.empty() && mask[static_cast<std::size_t>(i)];
}

std::vector<Index> eligible_nodes(Index n, const std::vector<bool>& excluded) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (!is_excluded(excluded, i)) out.push_back(i);
  return out;
}

void check_centers(const FactorModel& f, const Matrix& centers) {
  if (centers.rows() != f.variables())
    throw Error(ErrorCode::DimensionMismatch,
                "centers must have " + std::to_string(f.variables()) + " rows, got " +
                    std::to_string(centers.rows()));
}

bool explicit_path(const ColumnScalings& scal) {
  return scal.kind == EstimatorKind::SymmetricGeometricMean && scal.mixed_signs;
}

// Visits the cross terms c_k^T p_j in column blocks.
template <class Visit>
void for_each_cross_block(const FactorModel& f, const ColumnScalings& scal,
                          const Matrix& centers, std::size_t* fallbacks,
                          Visit&& visit) {
  check_centers(f, centers);
  const Index n = f.variables();
  const Index k = centers.cols();

  if (explicit_path(scal)) {
    parallel_chunks(static_cast<std::size_t>(n), kCrossGrain,
                    [&](std::size_t begin, std::size_t end) {
      Matrix block = Matrix::Zero(k, static_cast<Index>(end - begin));
      for (std::size_t j = begin; j < end; ++j) {
        const auto jj = static_cast<Index>(j);
        if (scal.is_excluded(jj)) continue;
        block.col(static_cast<Index>(j - begin)) =
            centers.transpose() * pcor_column(f, scal, jj);
      }
      visit(begin, end, block);
    });
    if (fallbacks) *fallbacks += static_cast<std::size_t>(n);
    return;
  }

  const Matrix weighted = scal.z.asDiagonal() * centers;
  // (C_z^T A^+)^T = U diag(g) V^T C_z, an m x K matrix.
  Matrix proj = f.V().transpose() * weighted;
  proj = f.pinv_gain().asDiagonal() * proj;
  const Matrix left = (f.U() * proj).transpose();
  const Matrix& a = f.data().values();

  parallel_chunks(static_cast<std::size_t>(n), kCrossGrain,
                  [&](std::size_t begin, std::size_t end) {
    const auto b = static_cast<Index>(begin);
    const auto len = static_cast<Index>(end - begin);
    Matrix block = left * a.middleCols(b, len);
    for (Index c = 0; c < len; ++c) {
      const Index j = b + c;
      if (scal.is_excluded(j)) {
        block.col(c).setZero();
        continue;
      }
      const double zeta = scal.zeta(j);
      block.col(c) *= zeta;
      block.col(c) -= weighted.row(j).transpose() * (scal.diag_r(j) * zeta);
    }
    visit(begin, end, block);
  });
}

Assignment assign_from_scores(Index n, Index k, const std::vector<bool>& excluded,
                              const auto& score_block_source) {
  Assignment out;
  out.labels.assign(static_cast<std::size_t>(n), kUnassigned);
  out.best = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> chunk_margin(chunk_count(static_cast<std::size_t>(n), kCrossGrain), kInf);

  score_block_source([&](std::size_t begin, std::size_t end, const Matrix& scores) {
    double margin = kInf;
    for (std::size_t j = begin; j < end; ++j) {
      const auto jj = static_cast<Index>(j);
      if (is_excluded(excluded, jj)) continue;
      const auto col = scores.col(static_cast<Index>(j - begin));
      int best = 0;
      double best_v = col(0);
      double second = kInf;
      for (Index c = 1; c < k; ++c) {
        const double v = col(c);
        if (v < best_v) {
          second = best_v;
          best_v = v;
          best = static_cast<int>(c);
        } else if (v < second) {
          second = v;
        }
      }
      out.labels[j] = best;
      out.best(jj) = best_v;
      margin = std::min(margin, second - best_v);
    }
    chunk_margin[begin / kCrossGrain] = margin;
  });
  out.min_margin = kInf;
  for (double m : chunk_margin) out.min_margin = std::min(out.min_margin, m);
  return out;
}

std::vector<Index> cluster_sizes(const Labels& labels, int k) {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) {
    if (l == kUnassigned) continue;
    if (l < 0 || l >= k)
      throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(l) +
                                                  " outside 0.." + std::to_string(k - 1));
    ++sizes[static_cast<std::size_t>(l)];
  }
  return sizes;
}

Assignment assign_impl(const FactorModel& f, const ColumnScalings& scal,
                       const Matrix& centers, std::size_t* fallbacks) {
  const Vector norms = centers.colwise().squaredNorm().transpose();
  return assign_from_scores(
      f.variables(), centers.cols(), scal.excluded, [&](auto&& sink) {
        for_each_cross_block(f, scal, centers, fallbacks,
                             [&](std::size_t begin, std::size_t end, Matrix& block) {
          // Squared distance minus the node's own ||p_j||^2.
          block = (-2.0 * block).colwise() + norms;
          sink(begin, end, block);
        });
      });
}

Matrix update_impl(const FactorModel& f, const ColumnScalings& scal,
                   const Labels& labels, int k, std::size_t* fallbacks) {
  const Index n = f.variables();
  if (static_cast<Index>(labels.size()) != n)
    throw Error(ErrorCode::LengthMismatch, "labels do not match the node count");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  const auto sizes = cluster_sizes(labels, k);

  if (explicit_path(scal)) {
    Matrix centers = Matrix::Zero(n, k);
    for (Index j = 0; j < n; ++j) {
      const int l = labels[static_cast<std::size_t>(j)];
      if (l == kUnassigned || scal.is_excluded(j)) continue;
      centers.col(l) += pcor_column(f, scal, j) / static_cast<double>(sizes[l]);
    }
    if (fallbacks) *fallbacks += static_cast<std::size_t>(n);
    return centers;
  }

  // Normalized membership weights zeta_j / |S_l|.
  Vector weight = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const int l = labels[static_cast<std::size_t>(j)];
    if (l == kUnassigned || scal.is_excluded(j)) continue;
    weight(j) = scal.zeta(j) / static_cast<double>(sizes[l]);
  }

  const Matrix& a = f.data().values();
  const std::size_t chunks = chunk_count(static_cast<std::size_t>(n), kAccumGrain);
  std::vector<Matrix> partial(chunks);
  parallel_chunks(static_cast<std::size_t>(n), kAccumGrain,
                  [&](std::size_t begin, std::size_t end) {
    Matrix acc = Matrix::Zero(a.rows(), k);
    for (std::size_t j = begin; j < end; ++j) {
      const int l = labels[j];
      const auto jj = static_cast<Index>(j);
      if (weight(jj) == 0.0) continue;
      acc.col(l) += weight(jj) * a.col(jj);
    }
    partial[begin / kAccumGrain] = std::move(acc);
  });
  Matrix weighted_sum = std::move(partial[0]);
  for (std::size_t c = 1; c < chunks; ++c) weighted_sum += partial[c];
  partial.clear();

  Matrix centers = f.pinv_gain().asDiagonal() * (f.U().transpose() * weighted_sum);
  centers = f.V() * centers;
  for (Index j = 0; j < n; ++j) {
    if (weight(j) == 0.0) continue;
    centers(j, labels[static_cast<std::size_t>(j)]) -= scal.diag_r(j) * weight(j);
  }
  return scal.z.asDiagonal() * centers;
}

Vector norms_impl(const FactorModel& f, const ColumnScalings& scal,
                  std::size_t* fallbacks) {
  const Index n = f.variables();
  Vector out = Vector::Zero(n);
  if (explicit_path(scal)) {
    parallel_chunks(static_cast<std::size_t>(n), kDefaultGrain,
                    [&](std::size_t begin, std::size_t end) {
      for (auto j = static_cast<Index>(begin); j < static_cast<Index>(end); ++j)
        if (!scal.is_excluded(j)) out(j) = pcor_column(f, scal, j).squaredNorm();
    });
    if (fallbacks) *fallbacks += static_cast<std::size_t>(n);
    return out;
  }
  // p_j = zeta_j z .* (V g_j) with entry j dropped, g_j = diag(gain) U^T a_j;
  // ||z .* V g||^2 = g^T (V^T diag(z^2) V) g.
  const Matrix gram = f.V().transpose() * scal.z.cwiseAbs2().asDiagonal() * f.V();
  const Matrix& a = f.data().values();
  parallel_chunks(static_cast<std::size_t>(n), kCrossGrain,
                  [&](std::size_t begin, std::size_t end) {
    const auto b = static_cast<Index>(begin);
    const auto len = static_cast<Index>(end - begin);
    const Matrix g = f.pinv_gain().asDiagonal() * (f.U().transpose() * a.middleCols(b, len));
    const Matrix hg = gram * g;
    for (Index c = 0; c < len; ++c) {
      const Index j = b + c;
      if (scal.is_excluded(j)) continue;
      const double zeta = scal.zeta(j);
      const double full = zeta * zeta * g.col(c).dot(hg.col(c));
      const double own = zeta * scal.z(j) * f.V().row(j).dot(g.col(c));
      out(j) = std::max(0.0, full - own * own);
    }
  });
  return out;
}

// Geometry adapters for the shared Lloyd driver.
class ImplicitGeometry {
 public:
  ImplicitGeometry(const FactorModel& f, const ColumnScalings& scal)
      : f_(f), scal_(scal) {}

  Index size() const { return f_.variables(); }
  const std::vector<bool>& excluded() const { return scal_.excluded; }
  Matrix centers(const Labels& labels, int k) {
    return update_impl(f_, scal_, labels, k, &fallbacks);
  }
  Assignment assign(const Matrix& centers) {
    return assign_impl(f_, scal_, centers, &fallbacks);
  }
  // Added to Assignment::best to recover the squared distance.
  double norm_sq(Index j) {
    if (!norms_) norms_ = norms_impl(f_, scal_, &fallbacks);
    return (*norms_)(j);
  }
  Matrix node_columns(const std::vector<Index>& nodes) {
    Matrix out(size(), static_cast<Index>(nodes.size()));
    for (std::size_t c = 0; c < nodes.size(); ++c)
      out.col(static_cast<Index>(c)) = pcor_column(f_, scal_, nodes[c]);
    return out;
  }
  Vector dist_sq_to_node(Index node) {
    const Matrix column = node_columns({node});
    Matrix cross(1, size());
    for_each_cross_block(f_, scal_, column, &fallbacks,
                         [&](std::size_t begin, std::size_t end, const Matrix& block) {
      cross.middleCols(static_cast<Index>(begin), static_cast<Index>(end - begin)) = block;
    });
    Vector out(size());
    const double own = column.col(0).squaredNorm();
    for (Index j = 0; j < size(); ++j) out(j) = norm_sq(j) + own - 2.0 * cross(0, j);
    return out;
  }

  std::size_t fallbacks = 0;

 private:
  const FactorModel& f_;
  const ColumnScalings& scal_;
  std::optional<Vector> norms_;
};

class DenseGeometry {
 public:
  DenseGeometry(const Matrix& points, const std::vector<bool>& excluded)
      : points_(points), excluded_(excluded) {
    if (!excluded_.empty() && static_cast<Index>(excluded_.size()) != points_.cols())
      throw Error(ErrorCode::LengthMismatch, "exclusion mask does not match the point count");
  }

  Index size() const { return points_.cols(); }
  const std::vector<bool>& excluded() const { return excluded_; }

  Matrix centers(const Labels& labels, int k) {
    if (static_cast<Index>(labels.size()) != size())
      throw Error(ErrorCode::LengthMismatch, "labels do not match the point count");
    const auto sizes = cluster_sizes(labels, k);
    Matrix sums = Matrix::Zero(points_.rows(), k);
    for (Index j = 0; j < size(); ++j) {
      const int l = labels[static_cast<std::size_t>(j)];
      if (l == kUnassigned || is_excluded(excluded_, j)) continue;
      sums.col(l) += points_.col(j);
    }
    for (int c = 0; c < k; ++c)
      if (sizes[c] > 0) sums.col(c) /= static_cast<double>(sizes[c]);
    return sums;
  }

  Assignment assign(const Matrix& centers) {
    if (centers.rows() != points_.rows())
      throw Error(ErrorCode::DimensionMismatch, "center dimension does not match points");
    const Index k = centers.cols();
    return assign_from_scores(size(), k, excluded_, [&](auto&& sink) {
      parallel_chunks(static_cast<std::size_t>(size()), kCrossGrain,
                      [&](std::size_t begin, std::size_t end) {
        Matrix block(k, static_cast<Index>(end - begin));
        for (std::size_t j = begin; j < end; ++j)
          for (Index c = 0; c < k; ++c)
            block(c, static_cast<Index>(j - begin)) =
                (points_.col(static_cast<Index>(j)) - centers.col(c)).squaredNorm();
        sink(begin, end, block);
      });
    });
  }

  double norm_sq(Index) const { return 0.0; }

  Matrix node_columns(const std::vector<Index>& nodes) const {
    Matrix out(points_.rows(), static_cast<Index>(nodes.size()));
    for (std::size_t c = 0; c < nodes.size(); ++c)
      out.col(static_cast<Index>(c)) = points_.col(nodes[c]);
    return out;
  }

  Vector dist_sq_to_node(Index node) const {
    return (points_.colwise() - points_.col(node)).colwise().squaredNorm().transpose();
  }

 private:
  const Matrix& points_;
  const std::vector<bool>& excluded_;
};

// Moves, for each empty cluster in index order, the node farthest from its
// current center into it. Donor clusters keep at least one member.
template <class Geometry>
std::size_t repair_empty(Geometry& geo, Labels& labels, const Assignment& asg, int k) {
  auto sizes = cluster_sizes(labels, k);
  std::vector<bool> moved(labels.size(), false);
  std::size_t repairs = 0;
  for (int c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    Index pick = -1;
    double far = -kInf;
    for (Index j = 0; j < geo.size(); ++j) {
      const int l = labels[static_cast<std::size_t>(j)];
      if (l == kUnassigned || moved[j] || sizes[l] <= 1) continue;
      const double d = asg.best(j) + geo.norm_sq(j);
      if (d > far) {
        far = d;
        pick = j;
      }
    }
    if (pick < 0) break;
    --sizes[labels[pick]];
    labels[pick] = c;
    sizes[c] = 1;
    moved[pick] = true;
    ++repairs;
  }
  return repairs;
}

template <class Geometry>
Labels farthest_first(Geometry& geo, int k, std::uint64_t seed, std::size_t* repairs) {
  const auto eligible = eligible_nodes(geo.size(), geo.excluded());
  if (static_cast<Index>(eligible.size()) < k)
    throw Error(ErrorCode::InvalidArgument, "fewer eligible nodes than clusters");
  std::mt19937_64 rng(seed);
  std::vector<Index> chosen{eligible[draw_below(rng, eligible.size())]};
  Vector nearest = geo.dist_sq_to_node(chosen.front());
  std::vector<bool> taken(static_cast<std::size_t>(geo.size()), false);
  taken[chosen.front()] = true;
  while (static_cast<int>(chosen.size()) < k) {
    Index next = -1;
    double far = -kInf;
    for (Index j : eligible)
      if (!taken[j] && nearest(j) > far) {
        far = nearest(j);
        next = j;
      }
    chosen.push_back(next);
    taken[next] = true;
    nearest = nearest.cwiseMin(geo.dist_sq_to_node(next));
  }
  const Assignment asg = geo.assign(geo.node_columns(chosen));
  Labels labels = asg.labels;
  *repairs += repair_empty(geo, labels, asg, k);
  return labels;
}

template <class Geometry>
ClusterState run_lloyd(Geometry& geo, const KMeansConfig& cfg) {
  const auto eligible = static_cast<Index>(eligible_nodes(geo.size(), geo.excluded()).size());
  if (cfg.k < 2)
    throw Error(ErrorCode::InvalidArgument, "k must be at least 2, got " + std::to_string(cfg.k));
  if (cfg.k > eligible)
    throw Error(ErrorCode::InvalidArgument,
                "k = " + std::to_string(cfg.k) + " exceeds the " +
                    std::to_string(eligible) + " non-degenerate nodes");
  if (cfg.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");

  ClusterState state;
  Labels labels = cfg.init == InitMethod::FarthestFirst
                      ? farthest_first(geo, cfg.k, cfg.seed, &state.reseeds)
                      : init_labels(geo.size(), cfg.k, cfg.seed, geo.excluded());
  if (cfg.record_history) state.label_history.push_back(labels);

  Matrix centers;
  bool centers_current = false;
  while (state.iterations < cfg.max_iters) {
    centers = geo.centers(labels, cfg.k);
    const Assignment asg = geo.assign(centers);
    Labels next = asg.labels;
    state.reseeds += repair_empty(geo, next, asg, cfg.k);

    std::size_t changed = 0;
    for (std::size_t j = 0; j < next.size(); ++j) changed += next[j] != labels[j];
    ++state.iterations;
    state.n_change = changed;
    state.n_change_history.push_back(changed);
    if (cfg.record_history) {
      state.label_history.push_back(next);
      state.min_margin_history.push_back(asg.min_margin);
    }
    labels = std::move(next);
    centers_current = changed == 0;
    if (changed == 0) {
      state.converged = true;
      break;
    }
  }
  if (!centers_current) centers = geo.centers(labels, cfg.k);
  state.centers = std::move(centers);
  state.labels = std::move(labels);
  return state;
}

}  // namespace

Labels init_labels(Index n, int k, std::uint64_t seed, const std::vector<bool>& excluded) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (!excluded.empty() && static_cast<Index>(excluded.size()) != n)
    throw Error(ErrorCode::LengthMismatch, "exclusion mask does not match n");
  const auto eligible = eligible_nodes(n, excluded);
  if (static_cast<Index>(eligible.size()) < k)
    throw Error(ErrorCode::InvalidArgument,
                "k = " + std::to_string(k) + " exceeds the " +
                    std::to_string(eligible.size()) + " eligible nodes");

  std::mt19937_64 rng(seed);
  Labels labels(static_cast<std::size_t>(n), kUnassigned);
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (Index i : eligible) {
    const auto l = static_cast<int>(draw_below(rng, static_cast<std::size_t>(k)));
    labels[static_cast<std::size_t>(i)] = l;
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (int c = 0; c < k; ++c) {
    while (sizes[c] == 0) {
      const Index i = eligible[draw_below(rng, eligible.size())];
      const int from = labels[static_cast<std::size_t>(i)];
      if (sizes[from] <= 1) continue;
      --sizes[from];
      labels[static_cast<std::size_t>(i)] = c;
      ++sizes[c];
    }
  }
  return labels;
}

Matrix cross_terms(const FactorModel& f, const ColumnScalings& scal, const Matrix& centers) {
  Matrix out(centers.cols(), f.variables());
  for_each_cross_block(f, scal, centers, nullptr,
                       [&](std::size_t begin, std::size_t end, const Matrix& block) {
    out.middleCols(static_cast<Index>(begin), static_cast<Index>(end - begin)) = block;
  });
  return out;
}

Assignment assign_labels(const FactorModel& f, const ColumnScalings& scal,
                         const Matrix& centers) {
  return assign_impl(f, scal, centers, nullptr);
}

Matrix update_centers(const FactorModel& f, const ColumnScalings& scal,
                      const Labels& labels, int k) {
  return update_impl(f, scal, labels, k, nullptr);
}

Vector column_norms_sq(const FactorModel& f, const ColumnScalings& scal) {
  return norms_impl(f, scal, nullptr);
}

ClusterState kmeans_implicit(const FactorModel& f, const ColumnScalings& scal,
                             const KMeansConfig& cfg) {
  if (scal.size() != f.variables())
    throw Error(ErrorCode::DimensionMismatch, "scalings do not match the factor model");
  ImplicitGeometry geo(f, scal);
  ClusterState state = run_lloyd(geo, cfg);
  state.weighted_centers = scal.z.asDiagonal() * state.centers;
  state.sign_test_fallbacks = geo.fallbacks;
  return state;
}

ClusterState kmeans_dense(const Matrix& points, const KMeansConfig& cfg,
                          const std::vector<bool>& excluded) {
  DenseGeometry geo(points, excluded);
  return run_lloyd(geo, cfg);
}

double kmeans_objective(const Matrix& points, const Labels& labels, int k) {
  if (static_cast<Index>(labels.size()) != points.cols())
    throw Error(ErrorCode::LengthMismatch, "labels do not match the point count");
  const std::vector<bool> none;
  DenseGeometry geo(points, none);
  const Matrix centers = geo.centers(labels, k);
  double total = 0.0;
  for (Index j = 0; j < points.cols(); ++j) {
    const int l = labels[static_cast<std::size_t>(j)];
    if (l != kUnassigned) total += (points.col(j) - centers.col(l)).squaredNorm();
  }
  return total;
}

}  // namespace ggmc
