#include "ggmc/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ggmc/error.hpp"

namespace ggmc {

namespace {

double parse_number(std::string_view s) {
  double v = 0.0;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidArgument, "bad model parameter '" + std::string(s) + "'");
  return v;
}

void check_blocks(Index n, const BlockModel& b) {
  if (b.blocks < 1 || b.blocks > n)
    throw Error(ErrorCode::InvalidArgument, "block count must lie in 1..n");
  if (!(b.between >= 0.0 && b.between <= b.within && b.within < 1.0))
    throw Error(ErrorCode::NotPositiveDefinite,
                "block model needs 0 <= between <= within < 1");
}

// Lower bidiagonal Cholesky factor of the chain precision.
void chain_cholesky(Index n, double rho, Vector& diag, Vector& sub) {
  diag.resize(n);
  sub = Vector::Zero(n);
  diag(0) = 1.0;
  for (Index i = 1; i < n; ++i) {
    sub(i) = -rho / diag(i - 1);
    const double pivot = 1.0 - sub(i) * sub(i);
    if (!(pivot > 0.0))
      throw Error(ErrorCode::NotPositiveDefinite,
                  "chain precision with rho = " + std::to_string(rho) +
                      " is not positive definite");
    diag(i) = std::sqrt(pivot);
  }
}

}  // namespace

SyntheticModel parse_model(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    auto rest = text.substr(colon + 1);
    for (;;) {
      const auto comma = rest.find(',');
      params.push_back(parse_number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  if (name == "chain") {
    if (params.size() > 1) throw Error(ErrorCode::InvalidArgument, "chain takes one parameter");
    return ChainModel{params.empty() ? 0.4 : params[0]};
  }
  if (name == "blocks") {
    BlockModel b;
    if (params.size() > 3) throw Error(ErrorCode::InvalidArgument, "blocks takes three parameters");
    if (params.size() > 0) b.blocks = static_cast<int>(params[0]);
    if (params.size() > 1) b.within = params[1];
    if (params.size() > 2) b.between = params[2];
    return b;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(text) + "'");
}

std::string to_string(const SyntheticModel& model) {
  std::ostringstream out;
  if (const auto* c = std::get_if<ChainModel>(&model)) {
    out << "chain:" << c->rho;
  } else {
    const auto& b = std::get<BlockModel>(model);
    out << "blocks:" << b.blocks << ',' << b.within << ',' << b.between;
  }
  return out.str();
}

Labels block_membership(Index n, int blocks) {
  Labels out(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] = static_cast<int>(j * blocks / n);
  return out;
}

Matrix generate_synthetic(Index n, Index m, const SyntheticModel& model, std::uint64_t seed) {
  if (n < 2 || m < 2)
    throw Error(ErrorCode::InvalidArgument, "need n >= 2 and m >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(m, n);

  if (const auto* chain = std::get_if<ChainModel>(&model)) {
    Vector diag, sub;
    chain_cholesky(n, chain->rho, diag, sub);
    Vector g(n);
    for (Index s = 0; s < m; ++s) {
      for (Index j = 0; j < n; ++j) g(j) = gauss(rng);
      // Solve L^T x = g so that cov(x) = (L L^T)^{-1}.
      double next = g(n - 1) / diag(n - 1);
      out(s, n - 1) = next;
      for (Index j = n - 2; j >= 0; --j) {
        next = (g(j) - sub(j + 1) * next) / diag(j);
        out(s, j) = next;
      }
    }
    return out;
  }

  const auto& b = std::get<BlockModel>(model);
  check_blocks(n, b);
  const Labels block = block_membership(n, b.blocks);
  const double global_w = std::sqrt(b.between);
  const double block_w = std::sqrt(b.within - b.between);
  const double noise_w = std::sqrt(1.0 - b.within);
  std::vector<double> factors(static_cast<std::size_t>(b.blocks));
  for (Index s = 0; s < m; ++s) {
    const double global = gauss(rng);
    for (auto& f : factors) f = gauss(rng);
    for (Index j = 0; j < n; ++j)
      out(s, j) = global_w * global + block_w * factors[block[j]] + noise_w * gauss(rng);
  }
  return out;
}

Matrix population_covariance(Index n, const SyntheticModel& model) {
  if (const auto* chain = std::get_if<ChainModel>(&model)) {
    Vector diag, sub;
    chain_cholesky(n, chain->rho, diag, sub);
    Matrix theta = Matrix::Identity(n, n);
    for (Index i = 0; i + 1 < n; ++i) theta(i, i + 1) = theta(i + 1, i) = -chain->rho;
    return theta.llt().solve(Matrix::Identity(n, n));
  }
  const auto& b = std::get<BlockModel>(model);
  check_blocks(n, b);
  const Labels block = block_membership(n, b.blocks);
  Matrix cov(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      cov(i, j) = i == j ? 1.0 : (block[i] == block[j] ? b.within : b.between);
  return cov;
}

Matrix smooth_rows(const Matrix& values, int half_width) {
  if (half_width < 0) throw Error(ErrorCode::InvalidArgument, "smoothing width must be >= 0");
  if (half_width == 0) return values;
  const Index n = values.cols();
  auto reflect = [n](Index k) {
    if (n == 1) return Index{0};
    const Index period = 2 * (n - 1);
    k %= period;
    if (k < 0) k += period;
    return k < n ? k : period - k;
  };
  const double weight = 1.0 / static_cast<double>(2 * half_width + 1);
  Matrix out = Matrix::Zero(values.rows(), n);
  for (Index j = 0; j < n; ++j)
    for (Index o = -half_width; o <= half_width; ++o) out.col(j) += values.col(reflect(j + o));
  out *= weight;
  return out;
}

DataMatrix smooth(const DataMatrix& data, int half_width) {
  return standardize(smooth_rows(data.values(), half_width));
}

}  // namespace ggmc
