#include "sdcs/dual_frames.hpp"

#include <stdexcept>

namespace sdcs {

DualFrame canonical_dual(const Matrix& frame) {
  return DualFrame{pseudo_inverse(frame), frame, NoiseShaper::identity()};
}

DualFrame h_dual(const Matrix& frame, const NoiseShaper& shaper) {
  const Bidiagonal factor = shaper.factor();
  const int r = shaper.order();
  const LeastSquares solver(apply_inverse_power(factor, r, frame));
  const Svd& d = solver.decomposition();

  // (H⁻¹E)† = V·Σ⁻¹·Uᵀ, so F = V·Σ⁻¹·(H⁻ᵀU)ᵀ.
  const Matrix back = apply_inverse_transpose_power(factor, r, d.left);
  const auto& sigma = d.spectrum.values();
  Matrix scaled_v = d.right;
  for (std::size_t i = 0; i < scaled_v.rows(); ++i) {
    for (std::size_t j = 0; j < scaled_v.cols(); ++j) scaled_v(i, j) /= sigma[j];
  }
  return DualFrame{scaled_v * back.transpose(), frame, shaper};
}

Vector reconstruct(const DualFrame& dual, std::span<const double> q) {
  if (q.size() != dual.synthesis.cols()) {
    throw std::invalid_argument("reconstruct: q has length " + std::to_string(q.size()) +
                                ", dual expects " + std::to_string(dual.synthesis.cols()));
  }
  return multiply(dual.synthesis, q);
}

Vector reconstruct_least_squares(const Matrix& frame, const NoiseShaper& shaper,
                                 std::span<const double> q) {
  if (q.size() != frame.rows()) throw std::invalid_argument("reconstruct_least_squares: length mismatch");
  const Matrix shaped = apply_inverse_power(shaper, shaper.order(), frame);
  const Vector rhs = apply_inverse_power(shaper, shaper.order(), Vector(q.begin(), q.end()));
  return LeastSquares(shaped).solve(rhs);
}

double frame_variation(const Matrix& synthesis) {
  const std::size_t m = synthesis.cols();
  const std::size_t k = synthesis.rows();
  double total = 0.0;
  Vector diff(k);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < k; ++i) {
      diff[i] = synthesis(i, j) - (j + 1 < m ? synthesis(i, j + 1) : 0.0);
    }
    total += norm2(diff);
  }
  return total;
}

double shaped_operator_norm(const Matrix& synthesis, const NoiseShaper& shaper) {
  // F·H = (Hᵀ·Fᵀ)ᵀ
  const Matrix fh_t = apply_transpose_power(shaper.factor(), shaper.order(), synthesis.transpose());
  return operator_norm_2(fh_t);
}

double shaped_sigma_min(const Matrix& frame, const NoiseShaper& shaper) {
  return singular_values(apply_inverse_power(shaper, shaper.order(), frame)).min();
}

}  // namespace sdcs
