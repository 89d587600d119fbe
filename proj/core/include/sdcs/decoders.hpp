#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sdcs/l1_decoder.hpp"
#include "sdcs/matrix.hpp"
#include "sdcs/noise_shaper.hpp"

namespace sdcs {

// k-sparse vector in ℝ^N. Support indices are zero-based, strictly increasing,
// and carry nonzero values.
class SparseSignal {
 public:
  SparseSignal(std::size_t dimension, std::vector<std::size_t> support, Vector values);

  std::size_t dimension() const { return dimension_; }
  std::size_t sparsity() const { return support_.size(); }
  const std::vector<std::size_t>& support() const { return support_; }
  const Vector& values() const { return values_; }
  double min_magnitude() const;
  Vector dense() const;

 private:
  std::size_t dimension_;
  std::vector<std::size_t> support_;
  Vector values_;
};

// Positions of the k′ largest |x′_j|, returned sorted ascending. Ties at the
// cut go to the smaller index. Requires k ≤ k′ ≤ N − 1 (k′ = N allowed only
// when k = N).
std::vector<std::size_t> estimate_support(std::span<const double> coarse, std::size_t k,
                                          std::size_t k_prime);

// γ = (1 + 1/(k′ − k + 1))^{1/2}: if ‖x − x′‖₂ ≤ η and every |x_j| on the true
// support exceeds γη, the k′ largest entries of x′ cover the true support.
double support_margin(std::size_t k, std::size_t k_prime);

// ε = 2^{r−1}·δ·√m, the ℓ2 radius that provably contains y − q for greedy
// r-th order noise shaping with step δ (r = 0 gives the PCM radius δ√m/2).
double quantization_radius(int order, double step, std::size_t m);

struct RecoveryOptions {
  std::size_t k_prime = 0;  // 0 selects k
  bool skip_fine = false;   // output the coarse estimate only
  // Reject Φ unless its RMS entry lies in [0.5, 2] (unit-variance scaling).
  bool check_normalization = true;
  L1Options l1;
};

struct RecoveryResult {
  Vector coarse;                     // x′
  std::vector<std::size_t> support;  // T′
  Vector fine;                       // x̂, zero off T′
  double radius = 0.0;
  int l1_iterations = 0;
  double sigma_min = 0.0;  // σ_min(H⁻¹Φ_{T′}), 0 if the fine stage was skipped
  std::optional<double> coarse_error;  // ‖x − x′‖₂ when truth is known
  std::optional<double> fine_error;    // ‖x − x̂‖₂
  bool support_exact = false;          // T′ = T
};

// Two-stage decoder for q obtained by noise shaping Φx with step δ:
// coarse ℓ1 decode with ε = 2^{r−1}δ√m, support estimate of size k′, then the
// H-dual of Φ_{T′} applied to q. Φ must use unit-variance entries (not 1/√m).
RecoveryResult two_stage_recover(const Matrix& phi, std::span<const double> q, std::size_t k,
                                 double step, const NoiseShaper& shaper,
                                 const RecoveryOptions& options = {},
                                 const SparseSignal* truth = nullptr);

}  // namespace sdcs
