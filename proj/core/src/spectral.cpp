#include "sdcs/spectral.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sdcs/noise_shaper.hpp"

namespace sdcs::spectral {
namespace {

constexpr double kPi = std::numbers::pi;
// Relative slack for comparing a numerical spectrum against closed forms.
constexpr double kCompareTolerance = 1e-9;

void require_order(int order) {
  if (order < 0) throw std::invalid_argument("spectral: order must be >= 0");
}

bool in_corner(std::size_t i, std::size_t j, std::size_t r, std::size_t m) {
  return (i < r && j < r) || (i >= m - r && j >= m - r);
}

}  // namespace

Matrix difference_power(int order, std::size_t m) {
  require_order(order);
  return NoiseShaper::difference(order).realize(m);
}

SingularSpectrum exact_singular_values_d(std::size_t m) {
  if (m == 0) throw std::invalid_argument("exact_singular_values_d: m must be >= 1");
  std::vector<double> s(m);
  const double denom = 2.0 * static_cast<double>(m) + 1.0;
  for (std::size_t j = 1; j <= m; ++j) s[j - 1] = 2.0 * std::cos(kPi * static_cast<double>(j) / denom);
  return SingularSpectrum(std::move(s));
}

SingularSpectrum exact_singular_values_dinv(std::size_t m) {
  if (m == 0) throw std::invalid_argument("exact_singular_values_dinv: m must be >= 1");
  std::vector<double> s(m);
  const double half = static_cast<double>(m) + 0.5;
  for (std::size_t j = 1; j <= m; ++j) {
    s[j - 1] = 1.0 / (2.0 * std::sin(kPi * (static_cast<double>(j) - 0.5) / (2.0 * half)));
  }
  return SingularSpectrum(std::move(s));
}

std::size_t dinv_sandwich_violations(std::size_t m) {
  const auto s = exact_singular_values_dinv(m);
  const double half = static_cast<double>(m) + 0.5;
  std::size_t bad = 0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double jj = static_cast<double>(j) - 0.5;
    const double lower = half / (kPi * jj);
    const double upper = half / (2.0 * jj);
    const double v = s[j - 1];
    if (v < lower * (1.0 - 1e-14) || v > upper * (1.0 + 1e-14)) ++bad;
  }
  return bad;
}

SingularSpectrum numerical_singular_values_dpow(int order, std::size_t m) {
  return singular_values(difference_power(order, m), /*extended_precision=*/true);
}

SingularSpectrum numerical_singular_values_dinvpow(int order, std::size_t m) {
  require_order(order);
  const Matrix inv = apply_inverse_power(NoiseShaper::difference(1), order, Matrix::identity(m));
  return singular_values(inv, /*extended_precision=*/true);
}

CommutatorRankReport commutator_rank_check(int order, std::size_t m) {
  require_order(order);
  const auto r = static_cast<std::size_t>(order);
  if (m < 2 * r || m == 0) throw std::invalid_argument("commutator_rank_check: need m >= 2r");
  const Matrix dr = difference_power(order, m);
  const Matrix d = difference_power(1, m);
  const Matrix dtd = d.transpose() * d;
  Matrix power = Matrix::identity(m);
  for (int i = 0; i < order; ++i) power = power * dtd;
  const Matrix c = dr.transpose() * dr - power;

  CommutatorRankReport report;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (in_corner(i, j, r, m)) continue;
      const double v = std::abs(c(i, j));
      report.max_off_corner = std::max(report.max_off_corner, v);
      if (v > 1e-10) ++report.corner_violations;
    }
  }
  const auto s = singular_values(c);
  const double threshold = 1e-10 * s.max();
  for (double v : s.values()) {
    if (s.max() > 0.0 && v > threshold) ++report.rank;
  }
  return report;
}

WeylReport weyl_sandwich_check(int order, std::size_t m) {
  require_order(order);
  const auto r = static_cast<std::size_t>(order);
  if (m < 4 * r || m == 0) throw std::invalid_argument("weyl_sandwich_check: need m >= 4r");
  const auto base = exact_singular_values_d(m);
  // Double precision: relative error stays below 1e-10 here, well inside the
  // comparison tolerance, at a quarter of the extended-precision cost.
  const auto powered = singular_values(difference_power(order, m));
  WeylReport report;
  for (std::size_t j = 1; j <= m; ++j) {
    const std::size_t lo_idx = std::min(j + 2 * r, m);
    const std::size_t hi_idx = j > 2 * r ? j - 2 * r : 1;
    const double lower = std::pow(base[lo_idx - 1], order);
    const double upper = std::pow(base[hi_idx - 1], order);
    const double v = powered[j - 1];
    ++report.checked;
    if (v < lower * (1.0 - kCompareTolerance) || v > upper * (1.0 + kCompareTolerance)) {
      ++report.violations;
    }
  }
  return report;
}

SzegoReport szego_distribution_check(int order, std::size_t m) {
  require_order(order);
  if (m < 10) throw std::invalid_argument("szego_distribution_check: need m >= 10");
  auto numeric = numerical_singular_values_dpow(order, m).values();
  std::vector<double> reference(m);
  for (std::size_t j = 1; j <= m; ++j) {
    reference[j - 1] = std::pow(2.0 * std::sin(kPi * static_cast<double>(j) / (2.0 * static_cast<double>(m))), order);
  }
  std::sort(numeric.begin(), numeric.end());
  std::sort(reference.begin(), reference.end());
  SzegoReport report;
  for (std::size_t j = 0; j < m; ++j) {
    report.sup_distance = std::max(report.sup_distance, std::abs(numeric[j] - reference[j]));
  }
  report.sigma_min_inverse = 1.0 / numeric.back();
  return report;
}

SpectralBoundCheck fit_power_law_bounds(int order, std::size_t m) {
  require_order(order);
  if (m < 4 * static_cast<std::size_t>(order) || m == 0) {
    throw std::invalid_argument("fit_power_law_bounds: need m >= 4r");
  }
  const auto s = numerical_singular_values_dinvpow(order, m);
  SpectralBoundCheck check;
  check.order = order;
  check.m = m;
  check.c1 = std::numeric_limits<double>::infinity();
  check.c2 = 0.0;
  const double md = static_cast<double>(m);
  for (std::size_t j = 1; j <= m; ++j) {
    const double scaled = s[j - 1] * std::pow(static_cast<double>(j) / md, order);
    check.c1 = std::min(check.c1, scaled);
    check.c2 = std::max(check.c2, scaled);
  }
  check.rows.reserve(m);
  for (std::size_t j = 1; j <= m; ++j) {
    const double growth = std::pow(md / static_cast<double>(j), order);
    check.rows.push_back({j, check.c1 * growth, s[j - 1], check.c2 * growth});
  }
  return check;
}

}  // namespace sdcs::spectral
