#include "sdcs/noise_shaper.hpp"

#include <stdexcept>

namespace sdcs {

NoiseShaper NoiseShaper::identity() { return NoiseShaper(ShaperKind::kIdentity, 0, 0.0); }

NoiseShaper NoiseShaper::difference(int order) {
  if (order < 0) throw std::invalid_argument("NoiseShaper: order must be >= 0");
  return NoiseShaper(ShaperKind::kDifferencePower, order, 0.0);
}

NoiseShaper NoiseShaper::high_pass(int order) {
  if (order < 0) throw std::invalid_argument("NoiseShaper: order must be >= 0");
  return NoiseShaper(ShaperKind::kHighPassPower, order, 0.0);
}

NoiseShaper NoiseShaper::leaky(int order, double mu) {
  if (order < 0) throw std::invalid_argument("NoiseShaper: order must be >= 0");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("NoiseShaper: leaky mu must lie in (0,1)");
  return NoiseShaper(ShaperKind::kLeaky, order, mu);
}

Bidiagonal NoiseShaper::factor() const {
  switch (kind_) {
    case ShaperKind::kIdentity: return {1.0, 0.0};
    case ShaperKind::kDifferencePower: return {1.0, -1.0};
    case ShaperKind::kHighPassPower: return {1.0, 1.0};
    case ShaperKind::kLeaky: return {1.0, -mu_};
  }
  return {1.0, 0.0};
}

std::vector<double> NoiseShaper::coefficients() const {
  // Binomial expansion of (1 + βz)^order.
  const double beta = factor().subdiagonal;
  const int r = kind_ == ShaperKind::kIdentity ? 0 : order_;
  std::vector<double> h(static_cast<std::size_t>(r) + 1, 0.0);
  h[0] = 1.0;
  for (int step = 0; step < r; ++step) {
    for (int i = step + 1; i >= 1; --i) h[i] += beta * h[i - 1];
  }
  return h;
}

Matrix NoiseShaper::realize(std::size_t m) const {
  const auto h = coefficients();
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < h.size() && d <= i; ++d) out(i, i - d) = h[d];
  }
  return out;
}

std::string NoiseShaper::name() const {
  switch (kind_) {
    case ShaperKind::kIdentity: return "pcm";
    case ShaperKind::kDifferencePower: return "diff";
    case ShaperKind::kHighPassPower: return "highpass";
    case ShaperKind::kLeaky: return "leaky";
  }
  return "pcm";
}

NoiseShaper NoiseShaper::parse(const std::string& name, int order, double mu) {
  if (name == "pcm" || name == "identity") return identity();
  if (name == "diff" || name == "sd" || name == "sobolev") return difference(order);
  if (name == "highpass") return high_pass(order);
  if (name == "leaky") return leaky(order, mu);
  throw std::invalid_argument("unknown shaper '" + name + "'");
}

Matrix difference_matrix(std::size_t m) { return NoiseShaper::difference(1).realize(m); }

namespace {

void check_factor(const Bidiagonal& f, int power) {
  if (power < 0) throw std::invalid_argument("apply_inverse_power: negative power");
  if (power > 0 && f.diagonal == 0.0) {
    throw std::domain_error("apply_inverse_power: zero diagonal entry");
  }
}

}  // namespace

Matrix apply_inverse_power(const Bidiagonal& f, int power, Matrix rhs) {
  check_factor(f, power);
  const std::size_t m = rhs.rows();
  const std::size_t n = rhs.cols();
  const double inv = 1.0 / f.diagonal;
  for (int pass = 0; pass < power; ++pass) {
    for (std::size_t j = 0; j < n; ++j) rhs(0, j) *= inv;
    for (std::size_t i = 1; i < m; ++i) {
      auto cur = rhs.row(i);
      const auto prev = rhs.row(i - 1);
      for (std::size_t j = 0; j < n; ++j) cur[j] = (cur[j] - f.subdiagonal * prev[j]) * inv;
    }
  }
  return rhs;
}

Vector apply_inverse_power(const Bidiagonal& f, int power, Vector rhs) {
  check_factor(f, power);
  const double inv = 1.0 / f.diagonal;
  for (int pass = 0; pass < power; ++pass) {
    if (rhs.empty()) break;
    rhs[0] *= inv;
    for (std::size_t i = 1; i < rhs.size(); ++i) rhs[i] = (rhs[i] - f.subdiagonal * rhs[i - 1]) * inv;
  }
  return rhs;
}

Matrix apply_inverse_transpose_power(const Bidiagonal& f, int power, Matrix rhs) {
  check_factor(f, power);
  const std::size_t m = rhs.rows();
  const std::size_t n = rhs.cols();
  if (m == 0) return rhs;
  const double inv = 1.0 / f.diagonal;
  for (int pass = 0; pass < power; ++pass) {
    for (std::size_t j = 0; j < n; ++j) rhs(m - 1, j) *= inv;
    for (std::size_t i = m - 1; i-- > 0;) {
      auto cur = rhs.row(i);
      const auto next = rhs.row(i + 1);
      for (std::size_t j = 0; j < n; ++j) cur[j] = (cur[j] - f.subdiagonal * next[j]) * inv;
    }
  }
  return rhs;
}

Matrix apply_power(const Bidiagonal& f, int power, Matrix x) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  for (int pass = 0; pass < power; ++pass) {
    for (std::size_t i = m; i-- > 0;) {
      auto cur = x.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        cur[j] = f.diagonal * cur[j] + (i > 0 ? f.subdiagonal * x(i - 1, j) : 0.0);
      }
    }
  }
  return x;
}

Vector apply_power(const Bidiagonal& f, int power, Vector x) {
  for (int pass = 0; pass < power; ++pass) {
    for (std::size_t i = x.size(); i-- > 0;) {
      x[i] = f.diagonal * x[i] + (i > 0 ? f.subdiagonal * x[i - 1] : 0.0);
    }
  }
  return x;
}

Matrix apply_transpose_power(const Bidiagonal& f, int power, Matrix x) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  for (int pass = 0; pass < power; ++pass) {
    for (std::size_t i = 0; i < m; ++i) {
      auto cur = x.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        cur[j] = f.diagonal * cur[j] + (i + 1 < m ? f.subdiagonal * x(i + 1, j) : 0.0);
      }
    }
  }
  return x;
}

}  // namespace sdcs
