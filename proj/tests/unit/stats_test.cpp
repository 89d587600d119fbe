#include <gtest/gtest.h>

#include <cmath>

#include "sdcs/stats.hpp"

using namespace sdcs;

TEST(Stats, Summarize) {
  const std::vector<double> v{3, 1, 2, 6};
  const Summary s = summarize(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 6.0);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
}

TEST(Stats, LogLogSlope) {
  std::vector<double> x{1, 2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 / (v * v));
  const LineFit f = fit_loglog_slope(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-13);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-13);
  EXPECT_NEAR(f.residual, 0.0, 1e-13);

  const std::vector<double> flat(5, 7.0);
  EXPECT_NEAR(fit_loglog_slope(x, flat).slope, 0.0, 1e-14);

  EXPECT_THROW(fit_loglog_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope(x, std::vector<double>{1, 2, 0, 4, 5}), std::domain_error);
  EXPECT_THROW(fit_loglog_slope(x, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(Stats, KolmogorovSmirnov) {
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_statistic({1, 2, 3}, {10, 11, 12}), 1.0);
  EXPECT_NEAR(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5, 1e-15);
  EXPECT_EQ(ks_p_value(0.0, 100, 100), 1.0);
  EXPECT_LT(ks_p_value(1.0, 100, 100), 1e-10);
  // Kolmogorov tail: Q(1.36) ≈ 0.05 for large samples
  const double n = 1e6;
  const double d = 1.36 / std::sqrt(n / 2);
  EXPECT_NEAR(ks_p_value(d, 1000000, 1000000), 0.0494, 0.002);
}
