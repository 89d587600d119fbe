#include <gtest/gtest.h>

#include <cmath>

#include "sdcs/l1_decoder.hpp"
#include "sdcs/random.hpp"
#include "test_support.hpp"

using namespace sdcs;

namespace {

Vector sparse_vector(std::size_t n, std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector x(n, 0.0);
  for (std::size_t j : random_subset(rng, n, k)) x[j] = rng.gaussian() + (rng.uniform() < 0.5 ? -1.0 : 1.0);
  return x;
}

L1Options admm() {
  L1Options o;
  o.method = L1Method::kAdmm;
  o.absolute_tolerance = 1e-10;
  o.relative_tolerance = 1e-9;
  return o;
}

}  // namespace

TEST(L1Decode, ZeroMeasurementsGiveZero) {
  const Matrix phi = sdcs_test::gaussian_matrix(5, 10, 1);
  for (double eps : {0.0, 0.3}) {
    for (const auto& o : {L1Options{}, admm()}) {
      const auto s = l1_decode(phi, Vector(5, 0.0), eps, o);
      EXPECT_EQ(s.z, Vector(10, 0.0));
      EXPECT_TRUE(s.converged);
    }
  }
}

TEST(L1Decode, LargeRadiusGivesZero) {
  const Matrix phi = sdcs_test::gaussian_matrix(5, 10, 2);
  const Vector q = sdcs_test::gaussian_vector(5, 3);
  const auto s = l1_decode(phi, q, norm2(q));
  EXPECT_EQ(s.z, Vector(10, 0.0));
}

TEST(L1Decode, RejectsBadArguments) {
  const Matrix phi = sdcs_test::gaussian_matrix(5, 10, 2);
  EXPECT_THROW(l1_decode(phi, Vector(4, 1.0), 0.1), std::invalid_argument);
  EXPECT_THROW(l1_decode(phi, Vector(5, 1.0), -0.1), std::invalid_argument);
}

TEST(L1Decode, ExactRecoveryMatchesExhaustiveOracle) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 8 + seed % 5;  // 8..12
    const std::size_t k = 1 + seed % 2;
    const std::size_t m = 5 + seed % 3;
    const Matrix phi = sdcs_test::gaussian_matrix(m, n, 1000 + seed);
    const Vector x = sparse_vector(n, k, 2000 + seed);
    const Vector q = multiply(phi, x);
    const auto oracle = sdcs_test::exhaustive_l1(phi, q);
    for (const auto& o : {L1Options{}, admm()}) {
      const auto s = l1_decode(phi, q, 0.0, o);
      const double tol = o.method == L1Method::kHomotopy ? 1e-6 : 1e-4;
      EXPECT_LE(norm_inf(subtract(s.z, oracle.z)), tol) << "seed " << seed;
      EXPECT_NEAR(norm1(s.z), oracle.l1, tol * std::max(1.0, oracle.l1));
    }
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST(L1Decode, NoisyContractAndKkt) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t m = 30 + seed % 20, n = 120, k = 3 + seed % 5;
    const Matrix phi = sdcs_test::gaussian_matrix(m, n, 500 + seed);
    const Vector x = sparse_vector(n, k, 600 + seed);
    Vector noise = sdcs_test::gaussian_vector(m, 700 + seed);
    const double eps = 0.05 * std::sqrt(double(m));
    const double scale = 0.9 * eps / norm2(noise);
    for (double& v : noise) v *= scale;
    Vector q = multiply(phi, x);
    for (std::size_t i = 0; i < m; ++i) q[i] += noise[i];

    const auto s = l1_decode(phi, q, eps);
    ASSERT_TRUE(s.converged);
    const Vector r = subtract(q, multiply(phi, s.z));
    EXPECT_LE(norm2(r), eps * (1 + 1e-6));
    EXPECT_LE(norm1(s.z), norm1(x) * (1 + 1e-4));
    EXPECT_NEAR(norm2(r), eps, 1e-9 * eps);  // the constraint is active

    // KKT: Φᵀr equals τ·sign(z) on the support and is bounded by τ elsewhere.
    const Vector c = multiply_transpose(phi, r);
    double tau = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s.z[j] != 0.0) tau = std::max(tau, std::abs(c[j]));
    }
    ASSERT_GT(tau, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (s.z[j] != 0.0) {
        EXPECT_NEAR(c[j], tau * (s.z[j] > 0 ? 1.0 : -1.0), 1e-8 * tau);
      } else {
        EXPECT_LE(std::abs(c[j]), tau * (1 + 1e-8));
      }
    }
  }
}

TEST(L1Decode, HomotopyAndAdmmAgree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t m = 25, n = 60, k = 4;
    const Matrix phi = sdcs_test::gaussian_matrix(m, n, 800 + seed);
    const Vector x = sparse_vector(n, k, 900 + seed);
    Vector q = multiply(phi, x);
    const Vector noise = sdcs_test::gaussian_vector(m, 950 + seed, 0.02);
    for (std::size_t i = 0; i < m; ++i) q[i] += noise[i];
    const double eps = 0.02 * std::sqrt(double(m));
    const auto h = l1_decode(phi, q, eps);
    const auto a = l1_decode(phi, q, eps, admm());
    EXPECT_LE(norm2(subtract(q, multiply(phi, a.z))), eps * (1 + 1e-6));
    EXPECT_NEAR(norm1(a.z), norm1(h.z), 1e-5 * norm1(h.z));
    EXPECT_LE(norm2(subtract(a.z, h.z)), 1e-3 * norm2(h.z));
  }
}

TEST(L1Decode, InfeasibleRadiusReportsMinimumResidual) {
  // 8×3 Φ cannot fit a generic q; the least-squares residual is the floor.
  const Matrix phi = sdcs_test::gaussian_matrix(8, 3, 4);
  const Vector q = sdcs_test::gaussian_vector(8, 5);
  const Vector ls = pseudo_inverse_apply(phi, q);
  const double floor = norm2(subtract(q, multiply(phi, ls)));
  for (const auto& o : {L1Options{}, admm()}) {
    try {
      l1_decode(phi, q, 0.5 * floor, o);
      FAIL() << "expected L1InfeasibleError";
    } catch (const L1InfeasibleError& e) {
      EXPECT_NEAR(e.min_residual(), floor, 1e-8 * floor);
    }
  }
  const auto ok = l1_decode(phi, q, 1.01 * floor);
  EXPECT_LE(ok.residual_norm, 1.01 * floor * (1 + 1e-9));
}

TEST(L1Decode, AdmmIterationCapReported) {
  const Matrix phi = sdcs_test::gaussian_matrix(20, 50, 6);
  const Vector q = multiply(phi, sparse_vector(50, 3, 7));
  L1Options o = admm();
  o.max_iterations = 2;
  try {
    l1_decode(phi, q, 0.01, o);
    FAIL() << "expected L1ConvergenceError";
  } catch (const L1ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.primal_residual() + e.dual_residual(), 0.0);
  }
}
