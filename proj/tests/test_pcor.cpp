#include <cmath>

#include "doctest.h"
#include "ggmc/error.hpp"
#include "ggmc/oracle.hpp"
#include "ggmc/pcor.hpp"
#include "ggmc/synthetic.hpp"
#include "test_support.hpp"

using namespace ggmc;
using ggmc::testing::gaussian;
using ggmc::testing::max_abs;

namespace {

// B = R_{-d} D_s from a densely formed R.
Matrix dense_B(const Matrix& r) {
  const Index n = r.rows();
  Matrix b(n, n);
  for (Index j = 0; j < n; ++j) {
    b.col(j) = r.col(j) / (1.0 - r(j, j));
    b(j, j) = 0.0;
  }
  return b;
}

Matrix geometric_mean_P(const Matrix& b) {
  const Index n = b.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (b(i, j) * b(j, i) > 0) p(i, j) = (b(i, j) > 0 ? 1 : -1) * std::sqrt(b(i, j) * b(j, i));
  return p;
}

Matrix residual_P(const Matrix& b, const Vector& d) {
  return d.asDiagonal() * b * d.cwiseInverse().asDiagonal();
}

}  // namespace

TEST_CASE("symmetric scalings at unresolved nodes are one") {
  // Columns 2 and 3 are orthogonal to the two retained triplets, so R_ii = 0.
  Matrix a = Matrix::Zero(4, 4);
  a.block(0, 0, 2, 2) << 10, 3, -2, 9;
  a.block(2, 2, 2, 2) << 0.5, 0.1, -0.1, 0.4;
  const FactorModel f = ggmc::testing::raw_factors(a, Regularization::truncated_svd(0.5));
  REQUIRE(f.rank() == 2);
  const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
  for (Index i : {2, 3}) {
    CHECK(std::abs(f.diag_resolution()(i)) <= 1e-14);
    CHECK(f.s()(i) == doctest::Approx(1.0));
    CHECK(scal.z(i) == doctest::Approx(1.0));
    CHECK(scal.zeta(i) == doctest::Approx(1.0));
  }
}

TEST_CASE("asymmetric scalings exclude zero-residual nodes") {
  // Both columns equal e_1, so each is reproduced exactly with R_ii = 1/2.
  Matrix a(2, 3);
  a << 1, 1, 0,
       0, 0, 0;
  a(1, 2) = 1;
  const FactorModel f = ggmc::testing::raw_factors(a, Regularization::truncated_svd(0.5));
  REQUIRE(f.rank() == 1);
  CHECK(f.residual_norm(0) == 0.0);
  CHECK(f.diag_resolution()(0) == doctest::Approx(0.5));
  const ColumnScalings scal = scalings(f, EstimatorKind::Asymmetric);
  CHECK(scal.is_excluded(0));
  CHECK(scal.is_excluded(1));
  try {
    pcor_column(f, scal, 0);
    FAIL("expected DegenerateNode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateNode);
  }
}

TEST_CASE("asymmetric scalings: z = d and zeta = s / d") {
  const auto data = ggmc::testing::standardized(10, 18, 31);
  const FactorModel f = build_factors(data, Regularization::truncated_svd(6.0 / 9.0));
  REQUIRE(f.rank() == 6);
  const ColumnScalings scal = scalings(f, EstimatorKind::Asymmetric);
  CHECK(max_abs(scal.z, f.residual_norms()) == 0.0);
  CHECK(max_abs(scal.zeta, f.s().cwiseQuotient(f.residual_norms())) <= 1e-14);
  const Matrix b = dense_B(oracle::dense_R(f));
  const Matrix p = residual_P(b, f.residual_norms());
  for (Index i = 0; i < 18; ++i) CHECK(max_abs(pcor_column(f, scal, i), p.col(i)) <= 1e-12);
}

TEST_CASE("beta columns") {
  SUBCASE("zero diagonal") {
    const auto data = ggmc::testing::standardized(9, 14, 32);
    const FactorModel f = build_factors(data, Regularization::truncated_svd(0.5));
    for (Index i = 0; i < 14; ++i) CHECK(beta_column(f, i)(i) == 0.0);
  }
  SUBCASE("ridge columns equal the directly solved neighbourhood regression") {
    const auto data = ggmc::testing::standardized(8, 16, 33);
    const FactorModel f = build_factors(data, Regularization::ridge(0.1));
    for (Index i = 0; i < 16; ++i)
      CHECK(max_abs(beta_column(f, i), oracle::ridge_neighborhood(*data, i, 0.1)) <= 1e-8);
  }
  SUBCASE("truncated columns equal the dense R_{-d} D_s") {
    const auto data = ggmc::testing::standardized(10, 25, 34);
    const FactorModel f = build_factors(data, Regularization::truncated_svd(6.0 / 9.0));
    const Matrix b = dense_B(oracle::dense_R(f));
    for (Index i = 0; i < 25; ++i) CHECK(max_abs(beta_column(f, i), b.col(i)) <= 1e-12);
  }
}

TEST_CASE("partial-correlation columns") {
  SUBCASE("symmetric columns equal the dense geometric-mean estimate") {
    const auto data = ggmc::testing::standardized(12, 20, 35);
    const FactorModel f = build_factors(data, Regularization::truncated_svd(7.0 / 11.0));
    REQUIRE(f.rank() == 7);
    const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
    const Matrix p = geometric_mean_P(dense_B(oracle::dense_R(f)));
    for (Index i = 0; i < 20; ++i) {
      const Vector col = pcor_column(f, scal, i);
      CHECK(col(i) == 0.0);
      CHECK(max_abs(col, p.col(i)) <= 1e-12);
    }
  }
  SUBCASE("chain model recovers neighbour partial correlations") {
    const Matrix raw = generate_synthetic(10, 4000, ChainModel{0.4}, 7);
    const auto data = std::make_shared<const DataMatrix>(standardize(raw));
    const FactorModel f = build_factors(data, Regularization::ridge(1e-6));
    const ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
    for (Index i = 0; i + 1 < 10; ++i) {
      const Vector col = pcor_column(f, scal, i);
      CHECK(std::abs(std::abs(col(i + 1)) - 0.4) <= 0.05);
    }
  }
  SUBCASE("sign test zeroes entries whose s has the opposite sign") {
    const auto data = ggmc::testing::standardized(8, 10, 36);
    const FactorModel f = build_factors(data, Regularization::truncated_svd(0.5));
    ColumnScalings scal = scalings(f, EstimatorKind::SymmetricGeometricMean);
    scal.zeta(3) = -scal.zeta(3);
    scal.mixed_signs = true;
    const Vector col = pcor_column(f, scal, 0);
    CHECK(col(3) == 0.0);
    CHECK(col(4) != 0.0);
    const Vector flipped = pcor_column(f, scal, 3);
    for (Index j = 0; j < 10; ++j)
      if (j != 3) CHECK(flipped(j) == 0.0);
  }
}

TEST_CASE("dense P") {
  const auto data = ggmc::testing::standardized(15, 30, 37);
  const FactorModel f = build_factors(data, Regularization::truncated_svd(8.0 / 14.0));
  REQUIRE(f.rank() == 8);
  SUBCASE("symmetric estimate is exactly symmetric with zero diagonal") {
    const DensePcor p = dense_P(f, EstimatorKind::SymmetricGeometricMean);
    CHECK((p.P.array() == p.P.transpose().array()).all());
    CHECK(p.P.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("asymmetric columns agree with the factor path") {
    const DensePcor p = dense_P(f, EstimatorKind::Asymmetric);
    const ColumnScalings scal = scalings(f, EstimatorKind::Asymmetric);
    CHECK(p.P.diagonal().cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 0; i < 30; ++i) CHECK(max_abs(pcor_column(f, scal, i), p.P.col(i)) <= 1e-12);
  }
  SUBCASE("dense limit") {
    CHECK_THROWS_AS(dense_P(f, EstimatorKind::Asymmetric, 29), Error);
  }
}

TEST_CASE("column and dense estimates agree across estimators and regularizations") {
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const Index m = 8 + static_cast<Index>(seed % 3) * 7;
    const Index n = 12 + static_cast<Index>(seed % 4) * 40;
    const auto data = ggmc::testing::standardized(m, n, seed);
    for (const auto& reg : {Regularization::truncated_svd(0.6), Regularization::ridge(0.05)}) {
      const FactorModel f = build_factors(data, reg);
      for (auto kind : {EstimatorKind::Asymmetric, EstimatorKind::SymmetricGeometricMean}) {
        const ColumnScalings scal = scalings(f, kind);
        const DensePcor dense = dense_P(f, kind);
        double worst = 0.0;
        for (Index i = 0; i < n; ++i) {
          if (scal.is_excluded(i)) continue;
          const Vector col = pcor_column(f, scal, i);
          CHECK(std::abs(col(i)) <= 1e-12);
          worst = std::max(worst, max_abs(col, dense.P.col(i)));
        }
        CHECK(worst <= 1e-12);

        // Sign test: opposite-signed coefficient pairs give an exact zero.
        if (kind == EstimatorKind::SymmetricGeometricMean) {
          const Matrix b = dense_B(f.V() * f.resolution_gain().asDiagonal() * f.V().transpose());
          for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
              if (b(i, j) * b(j, i) < 0) CHECK(dense.P(i, j) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("neighbourhood identity holds for random ridge problems") {
  for (std::uint64_t seed = 60; seed < 65; ++seed) {
    const auto data = ggmc::testing::standardized(6 + static_cast<Index>(seed % 5) * 6, 15, seed);
    const double lambda = 0.01 * static_cast<double>(seed - 59);
    const FactorModel f = build_factors(data, Regularization::ridge(lambda));
    for (Index i = 0; i < 15; ++i)
      CHECK(max_abs(beta_column(f, i), oracle::ridge_neighborhood(*data, i, lambda)) <= 1e-8);
  }
}
