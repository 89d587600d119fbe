#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdcs/matrix.hpp"

namespace sdcs {

// Lower bidiagonal factor with constant diagonal and subdiagonal. Every noise
// shaper realizes H = B^order for one of these factors B.
struct Bidiagonal {
  double diagonal = 1.0;
  double subdiagonal = 0.0;
};

enum class ShaperKind { kIdentity, kDifferencePower, kHighPassPower, kLeaky };

// Noise-shaping matrix H (m×m, lower triangular, unit diagonal) in structured
// form. The quantizer state obeys H·u = y − q.
//
//   Identity           H = I                 (PCM)
//   DifferencePower(r) H = D^r, D = I − S    (classical r-th order ΣΔ)
//   HighPassPower(r)   H = (I + S)^r
//   Leaky(r, μ)        H = (I − μS)^r, 0 < μ < 1
//
// S is the down-shift matrix.
class NoiseShaper {
 public:
  static NoiseShaper identity();
  static NoiseShaper difference(int order);
  static NoiseShaper high_pass(int order);
  static NoiseShaper leaky(int order, double mu);

  ShaperKind kind() const { return kind_; }
  int order() const { return order_; }
  double mu() const { return mu_; }
  Bidiagonal factor() const;

  // h_0 = 1, h_1, …, h_order: (H·u)_j = Σ_i h_i u_{j−i}.
  std::vector<double> coefficients() const;

  // Dense m×m H.
  Matrix realize(std::size_t m) const;

  // Short token used in CSV files and configs: pcm, diff, highpass, leaky.
  std::string name() const;
  static NoiseShaper parse(const std::string& name, int order, double mu);

  friend bool operator==(const NoiseShaper&, const NoiseShaper&) = default;

 private:
  NoiseShaper(ShaperKind kind, int order, double mu) : kind_(kind), order_(order), mu_(mu) {}

  ShaperKind kind_ = ShaperKind::kIdentity;
  int order_ = 0;
  double mu_ = 0.0;
};

// The m×m difference matrix D: 1 on the diagonal, −1 on the subdiagonal.
Matrix difference_matrix(std::size_t m);

// X with B^power·X = rhs, by `power` forward-substitution passes. B^{-1} is
// never formed. Throws std::domain_error on a zero diagonal.
Matrix apply_inverse_power(const Bidiagonal& factor, int power, Matrix rhs);
Vector apply_inverse_power(const Bidiagonal& factor, int power, Vector rhs);

// Same for the transpose (back substitution with Bᵀ).
Matrix apply_inverse_transpose_power(const Bidiagonal& factor, int power, Matrix rhs);

// B^power·X.
Matrix apply_power(const Bidiagonal& factor, int power, Matrix x);
Vector apply_power(const Bidiagonal& factor, int power, Vector x);
Matrix apply_transpose_power(const Bidiagonal& factor, int power, Matrix x);

// Shaper overloads: apply the shaper's factor `power` times.
inline Matrix apply_inverse_power(const NoiseShaper& shaper, int power, Matrix rhs) {
  return apply_inverse_power(shaper.factor(), power, std::move(rhs));
}
inline Vector apply_inverse_power(const NoiseShaper& shaper, int power, Vector rhs) {
  return apply_inverse_power(shaper.factor(), power, std::move(rhs));
}

}  // namespace sdcs
