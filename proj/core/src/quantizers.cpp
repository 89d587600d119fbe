#include "sdcs/quantizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace sdcs {

Alphabet Alphabet::unbounded(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("Alphabet: step must be > 0");
  return Alphabet(step, 0);
}

Alphabet Alphabet::finite(double step, int bits) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("Alphabet: step must be > 0");
  if (bits < 1 || bits > 52) throw std::invalid_argument("Alphabet: bits must lie in [1, 52]");
  return Alphabet(step, bits);
}

std::size_t Alphabet::levels() const { return is_finite() ? std::size_t{1} << bits_ : 0; }

double Alphabet::max_codeword() const {
  if (!is_finite()) return std::numeric_limits<double>::infinity();
  return step_ * (static_cast<double>(levels()) - 1.0) / 2.0;
}

double Alphabet::nearest(double w, bool* clipped) const {
  if (clipped) *clipped = false;
  if (!is_finite()) return step_ * std::round(w / step_);

  const double levels_d = static_cast<double>(levels());
  const double offset = (levels_d - 1.0) / 2.0;
  const double t = w / step_ + offset;  // codeword i sits at t = i
  double idx;
  if (t <= 0.0) {
    idx = 0.0;
  } else if (t >= levels_d - 1.0) {
    idx = levels_d - 1.0;
  } else {
    const double lo = std::floor(t);
    const double dlo = t - lo;
    const double dhi = (lo + 1.0) - t;
    if (dlo < dhi) {
      idx = lo;
    } else if (dhi < dlo) {
      idx = lo + 1.0;
    } else {
      // Tie: prefer the codeword of larger magnitude.
      idx = std::abs(lo - offset) > std::abs(lo + 1.0 - offset) ? lo : lo + 1.0;
    }
  }
  const double q = step_ * (idx - offset);
  if (clipped && std::abs(w - q) > 0.5 * step_ * (1.0 + 1e-12)) *clipped = true;
  return q;
}

QuantizationResult pcm_quantize(std::span<const double> y, const Alphabet& alphabet) {
  return shape_quantize(y, NoiseShaper::identity(), alphabet);
}

QuantizationResult sigma_delta_quantize(std::span<const double> y, int order,
                                        const Alphabet& alphabet) {
  if (order < 1) throw std::invalid_argument("sigma_delta_quantize: order must be >= 1");
  return shape_quantize(y, NoiseShaper::difference(order), alphabet);
}

QuantizationResult shape_quantize(std::span<const double> y, const NoiseShaper& shaper,
                                  const Alphabet& alphabet) {
  const auto h = shaper.coefficients();
  const std::size_t r = h.size() - 1;
  const bool compensated = r >= 3;
  const std::size_t m = y.size();

  QuantizationResult out;
  out.q.assign(m, 0.0);
  out.u.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(y[j])) throw std::invalid_argument("shape_quantize: non-finite input");
    // w_j = y_j − Σ_{i≥1} h_i u_{j−i}; states before j = 0 are zero.
    double w = y[j];
    double carry = 0.0;
    const std::size_t reach = std::min(r, j);
    for (std::size_t i = 1; i <= reach; ++i) {
      const double term = -h[i] * out.u[j - i];
      if (compensated) {
        // Neumaier summation.
        const double t = w + term;
        carry += std::abs(w) >= std::abs(term) ? (w - t) + term : (term - t) + w;
        w = t;
      } else {
        w += term;
      }
    }
    w += carry;

    bool clipped = false;
    const double q = alphabet.nearest(w, &clipped);
    if (clipped && !out.overloaded) {
      out.overloaded = true;
      out.overload_index = j;
    }
    out.q[j] = q;
    out.u[j] = w - q;
  }
  out.max_state = norm_inf(out.u);
  return out;
}

std::size_t distinct_levels(std::span<const double> q) {
  return std::set<double>(q.begin(), q.end()).size();
}

RateDistortionPlan rate_distortion_plan(double floor, int dyadic_scales, int order, std::size_t m,
                                        std::size_t k, double alpha) {
  if (!(floor > 0.0)) throw std::invalid_argument("rate_distortion_plan: A must be > 0");
  if (dyadic_scales < 0) throw std::invalid_argument("rate_distortion_plan: b must be >= 0");
  if (order < 1) throw std::invalid_argument("rate_distortion_plan: r must be >= 1");
  if (k < 1 || m < k) throw std::invalid_argument("rate_distortion_plan: need m >= k >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("rate_distortion_plan: alpha in (0,1)");

  const double r = order;
  const double kd = static_cast<double>(k);
  RateDistortionPlan plan;
  const double scale = std::pow(2.0, r + 0.5);
  plan.step = (floor / 5.0) / scale;
  plan.rho = std::ldexp(floor, dyadic_scales);
  plan.lambda = static_cast<double>(m) / kd;
  const double range = plan.rho * std::pow(plan.lambda, (1.0 - alpha) / 2.0) * kd;
  plan.bits_exact = 1.0 + std::log2(std::pow(2.0, r - 1.0) + range / plan.step);
  plan.bits = static_cast<int>(std::ceil(plan.bits_exact - 1e-12));
  plan.bits_approx =
      1.0 + std::log2(5.0 * std::pow(2.0, dyadic_scales + r + 0.5) *
                      std::pow(plan.lambda, (1.0 - alpha) / 2.0) * kd);
  plan.distortion_pcm = floor / scale;
  plan.distortion_sigma_delta = std::pow(plan.lambda, -alpha * (r - 0.5)) * plan.distortion_pcm;
  return plan;
}

}  // namespace sdcs
