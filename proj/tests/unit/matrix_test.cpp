#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "sdcs/linalg.hpp"
#include "sdcs/matrix.hpp"
#include "sdcs/noise_shaper.hpp"
#include "test_support.hpp"

using namespace sdcs;

TEST(Matrix, ConstructionValidatesShapeAndFiniteness) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(Matrix(1, 2, std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}),
               std::invalid_argument);
  EXPECT_THROW(Matrix(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}),
               std::invalid_argument);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), std::invalid_argument);
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a(1, 2), 6);
}

TEST(Matrix, ProductsAndTranspose) {
  const Matrix a{{1, 2}, {3, 4}, {5, 6}};
  const Matrix b{{1, 0, -1}, {2, 1, 0}};
  const Matrix c = a * b;
  EXPECT_EQ(c, (Matrix{{5, 2, -1}, {11, 4, -3}, {17, 6, -5}}));
  EXPECT_EQ(a.transpose(), (Matrix{{1, 3, 5}, {2, 4, 6}}));
  const Vector x{1, -1};
  EXPECT_EQ(multiply(a, x), (Vector{-1, -1, -1}));
  EXPECT_EQ(multiply_transpose(a, Vector{1, 1, 1}), (Vector{9, 12}));
  EXPECT_THROW(b * b, std::invalid_argument);
}

TEST(Matrix, ColumnSelectionAndTopRows) {
  const Matrix a{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const std::vector<std::size_t> idx{2, 0};
  EXPECT_EQ(a.select_columns(idx), (Matrix{{3, 1}, {6, 4}, {9, 7}}));
  EXPECT_EQ(a.top_rows(2), (Matrix{{1, 2, 3}, {4, 5, 6}}));
  EXPECT_EQ(a.column(1), (Vector{2, 5, 8}));
}

TEST(VectorNorms, Basics) {
  const Vector v{3, -4};
  EXPECT_DOUBLE_EQ(norm2(v), 5.0);
  EXPECT_DOUBLE_EQ(norm1(v), 7.0);
  EXPECT_DOUBLE_EQ(norm_inf(v), 4.0);
  // scaled accumulation survives values whose squares overflow
  const Vector big{1e200, 1e200};
  EXPECT_NEAR(norm2(big) / 1e200, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(norm2(Vector{}), 0.0);
}

TEST(PseudoInverse, IdentityReturnsRhs) {
  const Vector b{1.5, -2, 7};
  const Vector x = pseudo_inverse_apply(Matrix::identity(3), b);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(x[i], b[i], 1e-14);
}

TEST(PseudoInverse, TwoByOneHandComputed) {
  // (AᵀA)⁻¹Aᵀb = (1 + 3)/2
  const Vector x = pseudo_inverse_apply(Matrix{{1}, {1}}, Vector{1, 3});
  ASSERT_EQ(x.size(), 1u);
  EXPECT_NEAR(x[0], 2.0, 1e-14);
}

TEST(PseudoInverse, OrthonormalColumnsRecoverExactly) {
  const Matrix g = sdcs_test::gaussian_matrix(30, 5, 11);
  const Matrix e = svd(g).left;  // orthonormal columns
  const Vector x0{1, -2, 0.5, 3, -0.25};
  const Vector x = pseudo_inverse_apply(e, multiply(e, x0));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(x[i], x0[i], 1e-10);
}

TEST(PseudoInverse, ResidualOrthogonalToColumnSpace) {
  const Matrix a = sdcs_test::gaussian_matrix(40, 6, 3);
  const Vector b = sdcs_test::gaussian_vector(40, 4);
  const Vector x = pseudo_inverse_apply(a, b);
  const Vector r = subtract(b, multiply(a, x));
  const Vector at_r = multiply_transpose(a, r);
  EXPECT_LE(norm_inf(at_r), 1e-8 * frobenius_norm(a) * norm2(b));
}

TEST(PseudoInverse, RankDeficiencyReportsRatio) {
  const Matrix a{{1, 2}, {2, 4}, {3, 6}};
  try {
    pseudo_inverse_apply(a, Vector{1, 1, 1});
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_LT(e.ratio(), kRankTolerance);
  }
  EXPECT_THROW(LeastSquares(Matrix{{1, 2, 3}}), RankDeficientError);
}

TEST(PseudoInverse, MatrixFormIsLeftInverse) {
  const Matrix a = sdcs_test::gaussian_matrix(12, 4, 8);
  const Matrix p = pseudo_inverse(a);
  EXPECT_LE(max_abs_diff(p * a, Matrix::identity(4)), 1e-12);
}

TEST(ApplyInversePower, CumulativeSumsByHand) {
  const Matrix ones{{1}, {1}, {1}};
  const Matrix x = apply_inverse_power(NoiseShaper::difference(1), 1, ones);
  EXPECT_EQ(x, (Matrix{{1}, {2}, {3}}));
  const Matrix e1{{1}, {0}, {0}};
  EXPECT_EQ(apply_inverse_power(NoiseShaper::difference(1), 2, e1), (Matrix{{1}, {2}, {3}}));
  EXPECT_EQ(apply_inverse_power(NoiseShaper::difference(1), 0, ones), ones);
}

TEST(ApplyInversePower, RoundTripsRandomInputs) {
  for (int r = 1; r <= 4; ++r) {
    for (std::size_t m : {5u, 50u, 200u}) {
      const Matrix x = sdcs_test::gaussian_matrix(m, 3, 100 + r * 1000 + m);
      for (const auto& shaper : {NoiseShaper::difference(1), NoiseShaper::high_pass(1), NoiseShaper::leaky(1, 0.3)}) {
        const Bidiagonal b = shaper.factor();
        const Matrix hx = apply_power(b, r, x);
        const Matrix back = apply_inverse_power(b, r, hx);
        EXPECT_LE(frobenius_norm(back - x), 1e-9 * frobenius_norm(x)) << "r=" << r << " m=" << m;
        const Matrix realized = shaper.realize(m);
        Matrix hr = Matrix::identity(m);
        for (int i = 0; i < r; ++i) hr = realized * hr;
        EXPECT_LE(frobenius_norm(hr * back - hx), 1e-10 * frobenius_norm(hx));
      }
    }
  }
}

TEST(ApplyInversePower, ZeroDiagonalRejected) {
  EXPECT_THROW(apply_inverse_power(Bidiagonal{0.0, 1.0}, 1, Matrix{{1}, {1}}), std::domain_error);
}

TEST(OperatorNorm2, ZeroAndDifferenceMatrix) {
  EXPECT_EQ(operator_norm_2(Matrix(3, 2, 0.0)), 0.0);
  EXPECT_NEAR(operator_norm_2(difference_matrix(10)), 2 * std::cos(std::numbers::pi / 21), 1e-12);
}

TEST(OperatorNorm2, DominatesSampledDirectionsAndMatchesSphereSampling) {
  const Matrix a = sdcs_test::gaussian_matrix(4, 3, 21);
  const double norm = operator_norm_2(a);
  CounterRng rng(77);
  double best = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Vector x{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
    const double ratio = norm2(multiply(a, x));
    EXPECT_LE(ratio, norm * (1 + 1e-12));
    best = std::max(best, ratio);
  }
  EXPECT_NEAR(best, norm, 1e-3 * norm);
}

TEST(OperatorNormInf, RowSums) {
  EXPECT_EQ(operator_norm_inf(Matrix::identity(4)), 1.0);
  EXPECT_EQ(operator_norm_inf(Matrix(7, 5, 1.0)), 5.0);
  EXPECT_EQ(operator_norm_inf(Matrix{{1, -2}, {3, 0}}), 3.0);
}
