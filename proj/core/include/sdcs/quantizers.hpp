#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sdcs/matrix.hpp"
#include "sdcs/noise_shaper.hpp"

namespace sdcs {

// Uniform quantizer alphabet: either δℤ or the centered 2^B-level set
// {δ·(i − (L−1)/2) : i = 0..L−1}.
class Alphabet {
 public:
  static Alphabet unbounded(double step);
  static Alphabet finite(double step, int bits);

  double step() const { return step_; }
  bool is_finite() const { return bits_ > 0; }
  int bits() const { return bits_; }
  // 2^bits, or 0 when unbounded.
  std::size_t levels() const;
  // Largest codeword; +inf when unbounded.
  double max_codeword() const;

  // Nearest codeword to w, ties away from zero. `clipped` is set when w lies
  // more than δ/2 beyond the extreme codeword of a finite alphabet.
  double nearest(double w, bool* clipped = nullptr) const;

 private:
  Alphabet(double step, int bits) : step_(step), bits_(bits) {}
  double step_;
  int bits_;
};

struct QuantizationResult {
  Vector q;
  Vector u;
  bool overloaded = false;
  std::optional<std::size_t> overload_index;  // first overloaded sample
  double max_state = 0.0;                     // ‖u‖_∞
};

// Memoryless rounding: q_j = nearest codeword to y_j, u = y − q.
QuantizationResult pcm_quantize(std::span<const double> y, const Alphabet& alphabet);

// Greedy r-th order ΣΔ with zero initial state:
//   w_j = y_j + Σ_{i=1}^{r} (−1)^{i−1} C(r,i) u_{j−i},  q_j = nearest(w_j),  u_j = w_j − q_j.
QuantizationResult sigma_delta_quantize(std::span<const double> y, int order,
                                        const Alphabet& alphabet);

// Greedy recursion H·u = y − q for a general lower-triangular unit-diagonal
// shaper. Reduces to pcm_quantize for the identity and to sigma_delta_quantize
// for DifferencePower(r), bit for bit.
QuantizationResult shape_quantize(std::span<const double> y, const NoiseShaper& shaper,
                                  const Alphabet& alphabet);

// Number of distinct values in q (exact comparison).
std::size_t distinct_levels(std::span<const double> q);

struct RateDistortionPlan {
  double step = 0.0;           // δ_r = (A/5) / 2^{r+1/2}
  double rho = 0.0;            // 2^b·A
  double lambda = 0.0;         // m/k
  double bits_exact = 0.0;     // real solution B of 2^{B−1}δ_r = 2^{r−1}δ_r + ρλ^{(1−α)/2}k
  int bits = 0;                // ⌈bits_exact⌉
  double bits_approx = 0.0;    // 1 + log2(5·2^{b+r+1/2}·λ^{(1−α)/2}·k), dominant-term rate
  double distortion_sigma_delta = 0.0;  // λ^{−α(r−1/2)}·A/2^{r+1/2}
  double distortion_pcm = 0.0;          // A/2^{r+1/2}
};

// Step size, bit budget and predicted distortions for an r-th order ΣΔ encoder
// whose nonzero inputs range over b dyadic scales above the floor A.
RateDistortionPlan rate_distortion_plan(double floor, int dyadic_scales, int order, std::size_t m,
                                        std::size_t k, double alpha);

}  // namespace sdcs
