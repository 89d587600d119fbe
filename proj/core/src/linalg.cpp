#include "sdcs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sdcs {

LeastSquares::LeastSquares(const Matrix& a) {
  if (a.rows() < a.cols()) throw RankDeficientError(0.0);
  svd_ = svd(a);
  const double smax = svd_.spectrum.max();
  const double smin = svd_.spectrum.min();
  const double ratio = smax > 0.0 ? smin / smax : 0.0;
  if (!(ratio > kRankTolerance)) throw RankDeficientError(ratio);
}

Vector LeastSquares::solve(std::span<const double> b) const {
  const Matrix& u = svd_.left;
  const Matrix& v = svd_.right;
  const auto& sigma = svd_.spectrum.values();
  Vector coeff = multiply_transpose(u, b);
  for (std::size_t j = 0; j < coeff.size(); ++j) coeff[j] /= sigma[j];
  return multiply(v, coeff);
}

Matrix LeastSquares::pseudo_inverse() const {
  const Matrix& u = svd_.left;
  const Matrix& v = svd_.right;
  const auto& sigma = svd_.spectrum.values();
  Matrix scaled_v = v;
  for (std::size_t i = 0; i < scaled_v.rows(); ++i) {
    for (std::size_t j = 0; j < scaled_v.cols(); ++j) scaled_v(i, j) /= sigma[j];
  }
  return scaled_v * u.transpose();
}

Vector pseudo_inverse_apply(const Matrix& a, std::span<const double> b) {
  if (b.size() != a.rows()) throw std::invalid_argument("pseudo_inverse_apply: length mismatch");
  return LeastSquares(a).solve(b);
}

Matrix pseudo_inverse(const Matrix& a) { return LeastSquares(a).pseudo_inverse(); }

double operator_norm_2(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return singular_values(a).max();
}

double operator_norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, norm1(a.row(i)));
  return best;
}

}  // namespace sdcs
