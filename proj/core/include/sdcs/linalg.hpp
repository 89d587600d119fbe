#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "sdcs/matrix.hpp"
#include "sdcs/svd.hpp"

namespace sdcs {

// σ_min/σ_max below this ratio counts as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(double ratio)
      : std::runtime_error("matrix is rank deficient: sigma_min/sigma_max = " +
                           std::to_string(ratio)),
        ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

// Full-column-rank least squares through a precomputed SVD. Reusable for many
// right-hand sides.
class LeastSquares {
 public:
  // Throws RankDeficientError unless rows ≥ cols and σ_min > kRankTolerance·σ_max.
  explicit LeastSquares(const Matrix& a);

  // argmin_x ‖A·x − b‖₂
  Vector solve(std::span<const double> b) const;
  // A† = (AᵀA)⁻¹Aᵀ = V·Σ⁻¹·Uᵀ
  Matrix pseudo_inverse() const;
  const Svd& decomposition() const { return svd_; }

 private:
  Svd svd_;
};

Vector pseudo_inverse_apply(const Matrix& a, std::span<const double> b);
Matrix pseudo_inverse(const Matrix& a);

// σ_1(A)
double operator_norm_2(const Matrix& a);
// max_i Σ_j |a_ij|
double operator_norm_inf(const Matrix& a);

}  // namespace sdcs
