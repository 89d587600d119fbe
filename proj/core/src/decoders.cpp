#include "sdcs/decoders.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sdcs/dual_frames.hpp"

namespace sdcs {

SparseSignal::SparseSignal(std::size_t dimension, std::vector<std::size_t> support, Vector values)
    : dimension_(dimension), support_(std::move(support)), values_(std::move(values)) {
  if (support_.size() != values_.size()) {
    throw std::invalid_argument("SparseSignal: support and values differ in length");
  }
  if (support_.size() > dimension_) throw std::invalid_argument("SparseSignal: k > N");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] >= dimension_) throw std::invalid_argument("SparseSignal: index out of range");
    if (i > 0 && support_[i] <= support_[i - 1]) {
      throw std::invalid_argument("SparseSignal: support must be strictly increasing");
    }
    if (values_[i] == 0.0 || !std::isfinite(values_[i])) {
      throw std::invalid_argument("SparseSignal: values on the support must be finite and nonzero");
    }
  }
}

double SparseSignal::min_magnitude() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, std::abs(v));
  return m;
}

Vector SparseSignal::dense() const {
  Vector out(dimension_, 0.0);
  for (std::size_t i = 0; i < support_.size(); ++i) out[support_[i]] = values_[i];
  return out;
}

std::vector<std::size_t> estimate_support(std::span<const double> coarse, std::size_t k,
                                          std::size_t k_prime) {
  const std::size_t n = coarse.size();
  const bool full = k == n && k_prime == n;
  if (k_prime < k || (!full && k_prime + 1 > n)) {
    throw std::invalid_argument("estimate_support: k' = " + std::to_string(k_prime) +
                                " outside {k, ..., N-1}");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(coarse[a]) > std::abs(coarse[b]);
  });
  order.resize(k_prime);
  std::sort(order.begin(), order.end());
  return order;
}

double support_margin(std::size_t k, std::size_t k_prime) {
  if (k_prime < k) throw std::invalid_argument("support_margin: k' < k");
  return std::sqrt(1.0 + 1.0 / static_cast<double>(k_prime - k + 1));
}

double quantization_radius(int order, double step, std::size_t m) {
  return std::ldexp(step, order - 1) * std::sqrt(static_cast<double>(m));
}

RecoveryResult two_stage_recover(const Matrix& phi, std::span<const double> q, std::size_t k,
                                 double step, const NoiseShaper& shaper,
                                 const RecoveryOptions& options, const SparseSignal* truth) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  if (q.size() != m) throw std::invalid_argument("two_stage_recover: q length != rows of Phi");
  if (k == 0 || k > n) throw std::invalid_argument("two_stage_recover: k out of range");
  if (options.check_normalization) {
    const double rms = frobenius_norm(phi) / std::sqrt(static_cast<double>(m * n));
    if (rms < 0.5 || rms > 2.0) {
      throw std::invalid_argument("two_stage_recover: Phi must have unit-variance entries (RMS " +
                                  std::to_string(rms) + ")");
    }
  }

  RecoveryResult out;
  out.radius = quantization_radius(shaper.order(), step, m);
  const L1Solution coarse = l1_decode(phi, q, out.radius, options.l1);
  out.coarse = coarse.z;
  out.l1_iterations = coarse.iterations;

  const std::size_t k_prime = options.k_prime == 0 ? k : options.k_prime;
  out.support = estimate_support(out.coarse, k, k_prime);

  if (options.skip_fine) {
    out.fine = out.coarse;
  } else {
    const Matrix frame = phi.select_columns(out.support);
    const DualFrame dual = h_dual(frame, shaper);
    const Vector on_support = reconstruct(dual, q);
    out.fine.assign(n, 0.0);
    for (std::size_t i = 0; i < out.support.size(); ++i) out.fine[out.support[i]] = on_support[i];
    out.sigma_min = shaped_sigma_min(frame, shaper);
  }

  if (truth != nullptr) {
    if (truth->dimension() != n) throw std::invalid_argument("two_stage_recover: truth has wrong N");
    const Vector x = truth->dense();
    out.coarse_error = norm2(subtract(x, out.coarse));
    out.fine_error = norm2(subtract(x, out.fine));
    out.support_exact = out.support == truth->support();
  }
  return out;
}

}  // namespace sdcs
