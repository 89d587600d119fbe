#include "sdcs/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sdcs {

SingularSpectrum::SingularSpectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) return;
  const double tol = 1e-12 * values_.front();
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] >= 0.0)) throw std::invalid_argument("SingularSpectrum: negative value");
    if (j > 0 && values_[j] > values_[j - 1] + tol) {
      throw std::invalid_argument("SingularSpectrum: values not descending");
    }
  }
}

namespace {

// Columns stored contiguously; `len` entries per column.
template <typename T>
struct ColumnBlock {
  std::size_t len = 0;
  std::size_t count = 0;
  std::vector<T> data;

  T* col(std::size_t j) { return data.data() + j * len; }
  const T* col(std::size_t j) const { return data.data() + j * len; }
};

template <typename T>
T col_dot(const T* a, const T* b, std::size_t n) {
  T s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void rotate(T* a, T* b, std::size_t n, T c, T s) {
  for (std::size_t i = 0; i < n; ++i) {
    const T x = a[i];
    const T y = b[i];
    a[i] = c * x - s * y;
    b[i] = s * x + c * y;
  }
}

// Replace columns whose norm is (numerically) zero by unit vectors orthogonal
// to every other column.
void complete_orthonormal(Matrix& basis, const std::vector<bool>& valid) {
  const std::size_t n = basis.rows();
  const std::size_t p = basis.cols();
  std::size_t probe = 0;
  for (std::size_t j = 0; j < p; ++j) {
    if (valid[j]) continue;
    bool placed = false;
    while (!placed && probe < n) {
      Vector v(n, 0.0);
      v[probe++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < p; ++c) {
          if (c == j || (!valid[c] && c > j)) continue;
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += basis(i, c) * v[i];
          for (std::size_t i = 0; i < n; ++i) v[i] -= proj * basis(i, c);
        }
      }
      const double nv = norm2(v);
      if (nv > 1e-8) {
        for (std::size_t i = 0; i < n; ++i) basis(i, j) = v[i] / nv;
        placed = true;
      }
    }
  }
}

template <typename T>
Svd jacobi_svd(const Matrix& a, const SvdOptions& options) {
  const bool transposed = a.rows() < a.cols();
  const std::size_t len = transposed ? a.cols() : a.rows();
  const std::size_t count = transposed ? a.rows() : a.cols();

  ColumnBlock<T> w{len, count, std::vector<T>(len * count)};
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (transposed) {
        w.col(i)[j] = a(i, j);
      } else {
        w.col(j)[i] = a(i, j);
      }
    }
  }

  ColumnBlock<T> rot{count, count, {}};
  if (options.compute_bases) {
    rot.data.assign(count * count, T(0));
    for (std::size_t j = 0; j < count; ++j) rot.col(j)[j] = T(1);
  }

  const T tol = std::numeric_limits<T>::epsilon() * std::sqrt(static_cast<T>(len));
  std::vector<T> sq(count);
  for (std::size_t j = 0; j < count; ++j) sq[j] = col_dot(w.col(j), w.col(j), len);

  int sweep = 0;
  T worst = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    bool rotated = false;
    worst = 0;
    for (std::size_t p = 0; p + 1 < count; ++p) {
      for (std::size_t q = p + 1; q < count; ++q) {
        const T alpha = sq[p];
        const T beta = sq[q];
        if (alpha == T(0) || beta == T(0)) continue;
        const T gamma = col_dot(w.col(p), w.col(q), len);
        const T rel = std::abs(gamma) / std::sqrt(alpha * beta);
        worst = std::max(worst, rel);
        if (rel <= tol) continue;
        rotated = true;
        const T zeta = (beta - alpha) / (T(2) * gamma);
        const T t = (zeta >= 0 ? T(1) : T(-1)) / (std::abs(zeta) + std::sqrt(T(1) + zeta * zeta));
        const T c = T(1) / std::sqrt(T(1) + t * t);
        const T s = c * t;
        rotate(w.col(p), w.col(q), len, c, s);
        if (options.compute_bases) rotate(rot.col(p), rot.col(q), count, c, s);
        sq[p] = col_dot(w.col(p), w.col(p), len);
        sq[q] = col_dot(w.col(q), w.col(q), len);
      }
    }
    if (!rotated) break;
  }
  if (sweep == options.max_sweeps) {
    throw SvdConvergenceError(sweep, static_cast<double>(worst));
  }

  std::vector<T> sigma(count);
  for (std::size_t j = 0; j < count; ++j) sigma[j] = std::sqrt(col_dot(w.col(j), w.col(j), len));
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  std::vector<double> values(count);
  for (std::size_t j = 0; j < count; ++j) values[j] = static_cast<double>(sigma[order[j]]);

  Svd out;
  out.sweeps = sweep;
  if (options.compute_bases) {
    // `normalized` spans the long side, `rotation` the short side.
    Matrix normalized(len, count);
    Matrix rotation(count, count);
    std::vector<bool> valid(count, true);
    const T floor = (count > 0 ? sigma[order[0]] : T(0)) * std::numeric_limits<T>::epsilon() *
                    static_cast<T>(len);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t src = order[j];
      const T s = sigma[src];
      if (s <= floor || s == T(0)) {
        valid[j] = false;
      } else {
        for (std::size_t i = 0; i < len; ++i) {
          normalized(i, j) = static_cast<double>(w.col(src)[i] / s);
        }
      }
      for (std::size_t i = 0; i < count; ++i) rotation(i, j) = static_cast<double>(rot.col(src)[i]);
    }
    complete_orthonormal(normalized, valid);
    if (transposed) {
      out.left = std::move(rotation);
      out.right = std::move(normalized);
    } else {
      out.left = std::move(normalized);
      out.right = std::move(rotation);
    }
  }
  out.spectrum = SingularSpectrum(std::move(values));
  return out;
}

}  // namespace

Svd svd(const Matrix& a, const SvdOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  return options.extended_precision ? jacobi_svd<long double>(a, options)
                                    : jacobi_svd<double>(a, options);
}

SingularSpectrum singular_values(const Matrix& a, bool extended_precision) {
  SvdOptions options;
  options.compute_bases = false;
  options.extended_precision = extended_precision;
  return svd(a, options).spectrum;
}

}  // namespace sdcs
