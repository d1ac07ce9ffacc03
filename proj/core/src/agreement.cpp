#include "ggmc/agreement.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ggmc/error.hpp"

namespace ggmc {

std::vector<int> max_weight_matching(const Matrix& score) {
  const Index n = score.rows();
  if (score.cols() != n) throw Error(ErrorCode::InvalidArgument, "score matrix must be square");
  if (n == 0) return {};
  const double top = score.maxCoeff();
  // Minimize top - score with row/column potentials; 1-based internally.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_min(n + 1);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::fill(way_min.begin(), way_min.end(), kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const Index r0 = match[col0];
      double delta = kInf;
      Index col1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = (top - score(r0 - 1, c - 1)) - u[r0] - v[c];
        if (cur < way_min[c]) {
          way_min[c] = cur;
          way[c] = col0;
        }
        if (way_min[c] < delta) {
          delta = way_min[c];
          col1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          way_min[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const Index col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (Index c = 1; c <= n; ++c) out[static_cast<std::size_t>(match[c] - 1)] = static_cast<int>(c - 1);
  return out;
}

double disagreement_percent(const Labels& a, const Labels& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "labelings have " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()) + " nodes");
  int ka = 0, kb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ka = std::max(ka, a[i] + 1);
    kb = std::max(kb, b[i] + 1);
  }
  const int k = std::max(ka, kb);
  Matrix confusion = Matrix::Zero(k, k);
  std::size_t counted = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kUnassigned || b[i] == kUnassigned) continue;
    confusion(a[i], b[i]) += 1.0;
    ++counted;
  }
  if (counted == 0) return 0.0;
  const auto match = max_weight_matching(confusion);
  double agree = 0.0;
  for (int r = 0; r < k; ++r) agree += confusion(r, match[static_cast<std::size_t>(r)]);
  return 100.0 * (static_cast<double>(counted) - agree) / static_cast<double>(counted);
}

}  // namespace ggmc
