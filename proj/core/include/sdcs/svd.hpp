#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sdcs/matrix.hpp"

namespace sdcs {

// Singular values in descending order: σ_1 ≥ σ_2 ≥ … ≥ σ_p, p = min(rows, cols).
class SingularSpectrum {
 public:
  SingularSpectrum() = default;
  // Throws std::invalid_argument if the values are negative or not descending
  // (up to 1e-12·σ_1).
  explicit SingularSpectrum(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double max() const { return values_.empty() ? 0.0 : values_.front(); }
  double min() const { return values_.empty() ? 0.0 : values_.back(); }

 private:
  std::vector<double> values_;
};

class SvdConvergenceError : public std::runtime_error {
 public:
  SvdConvergenceError(int sweeps, double off_diagonal)
      : std::runtime_error("svd: Jacobi sweeps did not converge after " + std::to_string(sweeps) +
                           " sweeps (max relative off-diagonal " + std::to_string(off_diagonal) +
                           ")"),
        sweeps_(sweeps),
        off_diagonal_(off_diagonal) {}
  int sweeps() const { return sweeps_; }
  double off_diagonal() const { return off_diagonal_; }

 private:
  int sweeps_;
  double off_diagonal_;
};

struct SvdOptions {
  int max_sweeps = 60;
  // Accumulate the orthonormal bases. Disable when only the spectrum is needed.
  bool compute_bases = true;
  // Run the rotations in long double. Slower, roughly three extra digits on
  // the small end of badly scaled spectra.
  bool extended_precision = false;
};

// Thin SVD: A = U·diag(σ)·Vᵀ with U rows×p, V cols×p, p = min(rows, cols).
struct Svd {
  SingularSpectrum spectrum;
  Matrix left;
  Matrix right;
  int sweeps = 0;
};

// One-sided (Hestenes) Jacobi SVD.
Svd svd(const Matrix& a, const SvdOptions& options = {});

SingularSpectrum singular_values(const Matrix& a, bool extended_precision = false);

}  // namespace sdcs
