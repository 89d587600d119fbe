#pragma once

#include <span>

#include "sdcs/linalg.hpp"
#include "sdcs/matrix.hpp"
#include "sdcs/noise_shaper.hpp"

namespace sdcs {

// A left inverse F (k×m) of the analysis frame E (m×k), tied to the noise
// shaper it was optimized for.
struct DualFrame {
  Matrix synthesis;  // F
  Matrix frame;      // E
  NoiseShaper shaper = NoiseShaper::identity();
};

// F = E† = (EᵀE)⁻¹Eᵀ, through the SVD of E.
DualFrame canonical_dual(const Matrix& frame);

// H-dual for H = B^r, r = shaper.order():  F·H = (H⁻¹E)†, i.e.
// F = (H⁻¹E)†·H⁻¹. This is the minimizer of ‖F·H‖_op subject to F·E = I; for
// DifferencePower(r) it is the r-th order Sobolev dual. Throws
// RankDeficientError if H⁻¹E loses column rank.
DualFrame h_dual(const Matrix& frame, const NoiseShaper& shaper);

// x̂ = F·q
Vector reconstruct(const DualFrame& dual, std::span<const double> q);

// Same estimate through the least-squares route argmin_x ‖H⁻¹E·x − H⁻¹q‖₂.
Vector reconstruct_least_squares(const Matrix& frame, const NoiseShaper& shaper,
                                 std::span<const double> q);

// V(F) = Σ_j ‖f_j − f_{j+1}‖₂ over the columns of F with f_{m+1} = 0.
double frame_variation(const Matrix& synthesis);
inline double frame_variation(const DualFrame& dual) { return frame_variation(dual.synthesis); }

// ‖F·H‖_op for H realized by `shaper` (F·D^r for Sobolev duals).
double shaped_operator_norm(const Matrix& synthesis, const NoiseShaper& shaper);

// σ_min(H⁻¹E).
double shaped_sigma_min(const Matrix& frame, const NoiseShaper& shaper);

}  // namespace sdcs
