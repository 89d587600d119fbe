#pragma once

#include <cstddef>
#include <vector>

#include "sdcs/matrix.hpp"
#include "sdcs/svd.hpp"

// Exact and asymptotic facts about the spectrum of the difference matrix D and
// its powers, as executable checks.
namespace sdcs::spectral {

// D^r as a dense m×m matrix.
Matrix difference_power(int order, std::size_t m);

// σ_j(D) = 2cos(πj/(2m+1)), j = 1..m.
SingularSpectrum exact_singular_values_d(std::size_t m);

// σ_j(D⁻¹) = 1 / (2 sin(π(j−1/2)/(2(m+1/2)))), j = 1..m.
SingularSpectrum exact_singular_values_dinv(std::size_t m);

// Number of j violating (m+1/2)/(π(j−1/2)) ≤ σ_j(D⁻¹) ≤ (m+1/2)/(2(j−1/2)).
std::size_t dinv_sandwich_violations(std::size_t m);

// σ(D^r) numerically (one-sided Jacobi in extended precision).
SingularSpectrum numerical_singular_values_dpow(int order, std::size_t m);
// σ(D^{-r}) numerically, from the dense inverse power.
SingularSpectrum numerical_singular_values_dinvpow(int order, std::size_t m);

struct CommutatorRankReport {
  std::size_t rank = 0;
  std::size_t corner_violations = 0;  // entries outside the two r×r corners above 1e-10
  double max_off_corner = 0.0;
};

// C = (Dᵀ)^r D^r − (DᵀD)^r is supported on the top-left and bottom-right r×r
// corners, hence has rank ≤ 2r. Requires m ≥ 2r.
CommutatorRankReport commutator_rank_check(int order, std::size_t m);

struct WeylReport {
  std::size_t violations = 0;
  std::size_t checked = 0;
};

// Checks σ_{min(j+2r,m)}(D)^r ≤ σ_j(D^r) ≤ σ_{max(j−2r,1)}(D)^r for every j,
// with σ(D) from the closed form. Requires m ≥ 4r.
WeylReport weyl_sandwich_check(int order, std::size_t m);

struct SzegoReport {
  double sup_distance = 0.0;     // max_j |σ_(j)(D^r) − s_(j)| over sorted sequences
  double sigma_min_inverse = 0.0;  // σ_min(D^{-r}) = 1/σ_1(D^r), ≥ 2^{−r}
};

// Compares the numerical spectrum of D^r with the limiting sequence
// s_j = 2^r sin^r(πj/(2m)). Requires m ≥ 10.
SzegoReport szego_distribution_check(int order, std::size_t m);

struct PowerLawRow {
  std::size_t j = 0;
  double lower = 0.0;     // c₁·(m/j)^r
  double observed = 0.0;  // σ_j(D^{-r})
  double upper = 0.0;     // c₂·(m/j)^r
};

struct SpectralBoundCheck {
  int order = 0;
  std::size_t m = 0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<PowerLawRow> rows;
};

// Tightest c₁, c₂ with c₁(m/j)^r ≤ σ_j(D^{-r}) ≤ c₂(m/j)^r for all j. Requires m ≥ 4r.
SpectralBoundCheck fit_power_law_bounds(int order, std::size_t m);

}  // namespace sdcs::spectral
