#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "sdcs/matrix.hpp"

namespace sdcs {

// Solvers for the quadratically constrained basis pursuit program
//
//   minimize ‖z‖₁  subject to  ‖Φz − q‖₂ ≤ ε.
//
// kHomotopy follows the piecewise-linear LASSO path
// argmin ½‖Φz − q‖² + τ‖z‖₁ from τ = ‖Φᵀq‖_∞ downwards and stops at the
// breakpoint segment where the residual norm reaches ε; on that segment the
// crossing is solved in closed form, so the returned point is the exact
// minimizer up to rounding. Cost is a handful of Φᵀ·v products per active-set
// change, which suits sparse solutions.
//
// kAdmm splits z = x and alternates soft thresholding on x with the exact
// Euclidean projection of x onto the feasible set {z : ‖Φz − q‖ ≤ ε}, computed
// from a thin SVD of Φ. It returns the projected iterate, which is feasible at
// every step.
enum class L1Method { kHomotopy, kAdmm };

struct L1Options {
  L1Method method = L1Method::kHomotopy;
  int max_iterations = 50000;
  double absolute_tolerance = 1e-8;
  double relative_tolerance = 1e-6;
};

struct L1Solution {
  Vector z;
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;  // ‖Φz − q‖₂
};

class L1InfeasibleError : public std::runtime_error {
 public:
  L1InfeasibleError(double radius, double min_residual)
      : std::runtime_error("l1_decode: radius " + std::to_string(radius) +
                           " is below the smallest attainable residual " +
                           std::to_string(min_residual)),
        min_residual_(min_residual) {}
  double min_residual() const { return min_residual_; }

 private:
  double min_residual_;
};

class L1ConvergenceError : public std::runtime_error {
 public:
  L1ConvergenceError(int iterations, double primal_residual, double dual_residual)
      : std::runtime_error("l1_decode: no convergence after " + std::to_string(iterations) +
                           " iterations (primal " + std::to_string(primal_residual) + ", dual " +
                           std::to_string(dual_residual) + ")"),
        iterations_(iterations),
        primal_residual_(primal_residual),
        dual_residual_(dual_residual) {}
  int iterations() const { return iterations_; }
  double primal_residual() const { return primal_residual_; }
  double dual_residual() const { return dual_residual_; }

 private:
  int iterations_;
  double primal_residual_;
  double dual_residual_;
};

L1Solution l1_decode(const Matrix& phi, std::span<const double> q, double radius,
                     const L1Options& options = {});

}  // namespace sdcs
