#include <gtest/gtest.h>

#include <cmath>

#include "sdcs/ensembles.hpp"
#include "sdcs/random.hpp"
#include "sdcs/spectral.hpp"
#include "sdcs/stats.hpp"
#include "sdcs/svd.hpp"

using namespace sdcs;
using namespace sdcs::spectral;

TEST(Spectral, ClosedFormAtSmallM) {
  const auto one = exact_singular_values_d(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0], 1.0, 1e-15);
  EXPECT_NEAR(exact_singular_values_dinv(1)[0], 1.0, 1e-15);

  const auto exact = exact_singular_values_d(5);
  const auto numeric = singular_values(difference_power(1, 5));
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(exact[j], 2.0 * std::cos(M_PI * double(j + 1) / 11.0), 1e-15);
    EXPECT_NEAR(numeric[j], exact[j], 1e-13);
  }
  const auto inv = exact_singular_values_dinv(5);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(inv[j], 1.0 / exact[4 - j], 1e-13);
}

TEST(Spectral, NumericalMatchesClosedForm) {
  for (std::size_t m : {17u, 64u, 150u}) {
    const auto exact = exact_singular_values_d(m);
    const auto numeric = numerical_singular_values_dpow(1, m);
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(numeric[j], exact[j], 1e-12) << m << " " << j;
  }
}

TEST(Spectral, InversionIdentity) {
  for (int r = 1; r <= 4; ++r) {
    for (std::size_t m : {10u, 100u, 300u}) {
      const auto fwd = numerical_singular_values_dpow(r, m);
      const auto inv = numerical_singular_values_dinvpow(r, m);
      for (std::size_t j = 0; j < m; ++j) {
        const double expect = 1.0 / fwd[m - 1 - j];
        ASSERT_NEAR(inv[j], expect, 1e-8 * expect) << "r=" << r << " m=" << m << " j=" << j;
      }
    }
  }
}

TEST(Spectral, InverseSandwich) {
  for (std::size_t m : {1u, 2u, 7u, 100u, 1000u}) EXPECT_EQ(dinv_sandwich_violations(m), 0u) << m;
}

TEST(Spectral, CommutatorLivesInCorners) {
  const auto r1 = commutator_rank_check(1, 20);
  EXPECT_EQ(r1.corner_violations, 0u);
  EXPECT_LE(r1.rank, 2u);
  for (int r = 2; r <= 4; ++r) {
    for (std::size_t m : {std::size_t(2 * r), std::size_t(40)}) {
      const auto rep = commutator_rank_check(r, m);
      EXPECT_EQ(rep.corner_violations, 0u) << r << " " << m;
      EXPECT_LE(rep.rank, std::size_t(2 * r));
      EXPECT_GE(rep.rank, 1u);
    }
  }
  EXPECT_THROW(commutator_rank_check(3, 5), std::invalid_argument);
}

TEST(Spectral, WeylSandwich) {
  const auto a = weyl_sandwich_check(1, 30);
  EXPECT_EQ(a.violations, 0u);
  EXPECT_EQ(a.checked, 30u);
  const auto b = weyl_sandwich_check(2, 8);
  EXPECT_EQ(b.violations, 0u);
  for (int r = 1; r <= 3; ++r) EXPECT_EQ(weyl_sandwich_check(r, 120).violations, 0u);
  EXPECT_THROW(weyl_sandwich_check(2, 7), std::invalid_argument);
}

TEST(Spectral, SzegoDistanceShrinks) {
  for (int r = 1; r <= 3; ++r) {
    const auto small = szego_distribution_check(r, 50);
    const auto large = szego_distribution_check(r, 500);
    EXPECT_LT(large.sup_distance, small.sup_distance) << r;
    EXPECT_GE(small.sigma_min_inverse, std::ldexp(1.0, -r) * (1 - 1e-12));
    EXPECT_GE(large.sigma_min_inverse, std::ldexp(1.0, -r) * (1 - 1e-12));
  }
}

TEST(Spectral, PowerLawConstants) {
  const auto first = fit_power_law_bounds(1, 200);
  EXPECT_LE(first.c1, 0.5);
  EXPECT_GE(first.c2, 2.0 / M_PI - 0.01);
  for (int r = 1; r <= 3; ++r) {
    const auto a = fit_power_law_bounds(r, 100);
    const auto b = fit_power_law_bounds(r, 400);
    EXPECT_GT(a.c1, 0.0);
    EXPECT_LE(a.c1, a.c2);
    for (const auto& row : a.rows) {
      EXPECT_LE(row.lower, row.observed * (1 + 1e-12));
      EXPECT_LE(row.observed, row.upper * (1 + 1e-12));
    }
    EXPECT_LT(std::max(a.c1, b.c1) / std::min(a.c1, b.c1), 2.0) << r;
    EXPECT_LT(std::max(a.c2, b.c2) / std::min(a.c2, b.c2), 2.0) << r;
  }
}

TEST(Spectral, SigmaMinDependsOnlyOnSpectrum) {
  // Gaussian E is rotation invariant, so σ_min(D^{-r}E) and σ_min(ΣE′) with
  // Σ = diag σ(D^{-r}) share a distribution.
  const int r = 2;
  const std::size_t m = 40, k = 4, trials = 2000;
  const auto sigma = numerical_singular_values_dinvpow(r, m);
  std::vector<double> a(trials), b(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    a[t] = sigma_min_trial(r, m, k, Ensemble::kGaussianScaled, derive_seed(11, {t}));
    Matrix e = sample_matrix({Ensemble::kGaussianScaled, m, k, derive_seed(12, {t})});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) e(i, j) *= sigma[i];
    }
    b[t] = singular_values(e).min();
  }
  const double d = ks_statistic(a, b);
  EXPECT_GT(ks_p_value(d, trials, trials), 1e-3) << "D=" << d;
}
