#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdcs {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> values);

// Two-sample Kolmogorov–Smirnov statistic sup_t |F_a(t) − F_b(t)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic p-value of the two-sample KS statistic (Kolmogorov distribution
// with Stephens' small-sample correction).
double ks_p_value(double statistic, std::size_t n_a, std::size_t n_b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-space residuals
};

// Ordinary least squares of log(y) on log(x). Needs ≥ 3 points; throws
// std::domain_error on a nonpositive value.
LineFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sdcs
