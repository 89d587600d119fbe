#include "sdcs/l1_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sdcs/svd.hpp"

namespace sdcs {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Solves G·x = b for symmetric positive definite G; nullopt if G is not
// numerically positive definite.
std::optional<Vector> cholesky_solve(Matrix g, std::span<const double> b) {
  const std::size_t n = g.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = g(j, j);
    for (std::size_t p = 0; p < j; ++p) diag -= g(j, p) * g(j, p);
    if (!(diag > 1e-13 * std::max(1.0, g(j, j)))) return std::nullopt;
    const double l = std::sqrt(diag);
    g(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= g(i, p) * g(j, p);
      g(i, j) = s / l;
    }
  }
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < i; ++p) x[i] -= g(i, p) * x[p];
    x[i] /= g(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t p = i + 1; p < n; ++p) x[i] -= g(p, i) * x[p];
    x[i] /= g(i, i);
  }
  return x;
}

Vector residual_of(const Matrix& phi, std::span<const double> q, std::span<const double> z) {
  Vector r(q.begin(), q.end());
  const Vector pz = multiply(phi, z);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= pz[i];
  return r;
}

L1Solution solve_homotopy(const Matrix& phi, std::span<const double> q, double radius,
                          const L1Options& options) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  L1Solution out;
  out.z.assign(n, 0.0);

  const double q_norm = norm2(q);
  if (q_norm <= radius) {
    out.converged = true;
    out.residual_norm = q_norm;
    return out;
  }
  // Slack used only to accept a zero-radius endpoint reached in floating point.
  const double endpoint_slack = 1e-9 * q_norm;

  Vector r(q.begin(), q.end());
  Vector c = multiply_transpose(phi, q);
  std::size_t first = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs(c[j]) > std::abs(c[first])) first = j;
  }
  double tau = std::abs(c[first]);
  if (tau == 0.0) throw L1InfeasibleError(radius, q_norm);
  const double min_step = 1e-13 * tau;

  std::vector<std::size_t> active{first};
  std::vector<double> signs{sign_of(c[first])};
  std::vector<char> is_active(n, 0);
  is_active[first] = 1;
  std::size_t last_added = first;
  std::size_t last_removed = kNone;
  double removed_sign = 0.0;

  enum class Event { kEnd, kJoin, kDrop, kStop };

  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    const Matrix sub = phi.select_columns(active);
    const auto direction = cholesky_solve(sub.transpose() * sub, signs);
    if (!direction) {
      throw L1ConvergenceError(it, norm2(r), 0.0);
    }
    const Vector& d = *direction;
    const Vector a = multiply(sub, d);
    const Vector b = multiply_transpose(phi, a);

    double step = tau;
    Event event = Event::kEnd;
    std::size_t which = 0;

    if (active.size() < m) {
      for (std::size_t j = 0; j < n; ++j) {
        if (is_active[j]) continue;
        // A variable that just left sits at |c_j| = τ with its old sign; only
        // the opposite-sign crossing is a genuine re-entry.
        const bool just_left = last_removed == j;
        if (1.0 - b[j] > 0.0 && !(just_left && removed_sign > 0.0)) {
          const double g = (tau - c[j]) / (1.0 - b[j]);
          if (g > min_step && g < step) {
            step = g;
            event = Event::kJoin;
            which = j;
          }
        }
        if (1.0 + b[j] > 0.0 && !(just_left && removed_sign < 0.0)) {
          const double g = (tau + c[j]) / (1.0 + b[j]);
          if (g > min_step && g < step) {
            step = g;
            event = Event::kJoin;
            which = j;
          }
        }
      }
    }
    for (std::size_t p = 0; p < active.size(); ++p) {
      if (last_added == active[p]) continue;
      if (d[p] == 0.0) continue;
      const double g = -out.z[active[p]] / d[p];
      if (g > min_step && g < step) {
        step = g;
        event = Event::kDrop;
        which = p;
      }
    }
    // ‖r − γa‖² = ε² along the segment; smallest positive root.
    {
      const double aa = dot(a, a);
      const double ra = dot(r, a);
      const double excess = dot(r, r) - radius * radius;
      const double disc = ra * ra - aa * excess;
      if (aa > 0.0 && ra > 0.0 && disc >= 0.0) {
        const double g = excess / (ra + std::sqrt(disc));
        if (g <= step) {
          step = std::max(g, 0.0);
          event = Event::kStop;
        }
      }
    }

    for (std::size_t p = 0; p < active.size(); ++p) out.z[active[p]] += step * d[p];
    tau -= step;

    if (event == Event::kDrop) {
      const std::size_t idx = active[which];
      out.z[idx] = 0.0;
      is_active[idx] = 0;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(which));
      removed_sign = signs[which];
      signs.erase(signs.begin() + static_cast<std::ptrdiff_t>(which));
      last_removed = idx;
      last_added = kNone;
    }

    r = residual_of(phi, q, out.z);
    c = multiply_transpose(phi, r);

    if (event == Event::kStop) {
      out.converged = true;
      out.residual_norm = norm2(r);
      return out;
    }
    if (event == Event::kEnd) {
      // τ = 0: least squares on the active set.
      const Matrix final_sub = phi.select_columns(active);
      const Vector rhs = multiply_transpose(final_sub, q);
      const auto ls = cholesky_solve(final_sub.transpose() * final_sub, rhs);
      if (ls) {
        for (std::size_t p = 0; p < active.size(); ++p) out.z[active[p]] = (*ls)[p];
        r = residual_of(phi, q, out.z);
      }
      out.residual_norm = norm2(r);
      if (out.residual_norm <= radius + endpoint_slack) {
        out.converged = true;
        return out;
      }
      throw L1InfeasibleError(radius, out.residual_norm);
    }
    if (event == Event::kJoin) {
      active.push_back(which);
      signs.push_back(sign_of(c[which]));
      is_active[which] = 1;
      last_added = which;
      last_removed = kNone;
    }
  }
  throw L1ConvergenceError(options.max_iterations, norm2(r), tau);
}

// Euclidean projection onto {z : ‖Φz − q‖₂ ≤ ε} using Φ = U·S·Vᵀ.
class FeasibleSetProjector {
 public:
  FeasibleSetProjector(const Matrix& phi, std::span<const double> q, double radius) {
    svd_ = svd(phi);
    const Matrix& u = svd_.left;
    g_ = multiply_transpose(u, q);
    // Part of q outside the range of Φ is unreachable.
    const Vector back = multiply(u, g_);
    const double outside = norm2(subtract(q, back));
    const auto& s = svd_.spectrum.values();
    double fixed = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] <= kTiny * s.front()) fixed += g_[i] * g_[i];
    }
    const double floor = std::sqrt(outside * outside + fixed);
    if (floor > radius + 1e-9 * norm2(q)) throw L1InfeasibleError(radius, floor);
    budget_ = radius * radius - outside * outside;
    // No room left beyond the unreachable part: project onto Φz = Pq instead.
    affine_ = budget_ <= fixed;
  }

  Vector project(const Vector& v) const {
    const auto& s = svd_.spectrum.values();
    const Vector a = multiply_transpose(svd_.right, v);
    Vector coef(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      coef[i] = s[i] * a[i] - g_[i];
      total += coef[i] * coef[i];
    }
    if (affine_) {
      Vector delta(s.size(), 0.0);
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > kTiny * s.front()) delta[i] = coef[i] / s[i];
      }
      const Vector shift = multiply(svd_.right, delta);
      Vector z = v;
      for (std::size_t i = 0; i < z.size(); ++i) z[i] -= shift[i];
      return z;
    }
    if (total <= budget_) return v;

    // φ(t) = Σ c_i²/(1 + t s_i²)² − budget is convex and decreasing; Newton
    // from t = 0 approaches the root monotonically from the left.
    double t = 0.0;
    for (int it = 0; it < 500; ++it) {
      double phi = -budget_;
      double dphi = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double den = 1.0 + t * s[i] * s[i];
        const double c2 = coef[i] * coef[i];
        phi += c2 / (den * den);
        dphi -= 2.0 * c2 * s[i] * s[i] / (den * den * den);
      }
      if (phi <= 1e-15 * std::max(budget_, 1e-300) || dphi == 0.0) break;
      t -= phi / dphi;
    }
    Vector delta(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      delta[i] = t * s[i] * coef[i] / (1.0 + t * s[i] * s[i]);
    }
    const Vector shift = multiply(svd_.right, delta);
    Vector z = v;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= shift[i];
    return z;
  }

 private:
  static constexpr double kTiny = 1e-12;
  Svd svd_;
  Vector g_;
  double budget_ = 0.0;
  bool affine_ = false;
};

L1Solution solve_admm(const Matrix& phi, std::span<const double> q, double radius,
                      const L1Options& options) {
  const std::size_t n = phi.cols();
  L1Solution out;
  const double q_norm = norm2(q);
  if (q_norm <= radius) {
    out.z.assign(n, 0.0);
    out.converged = true;
    out.residual_norm = q_norm;
    return out;
  }
  const FeasibleSetProjector projector(phi, q, radius);

  Vector z = projector.project(Vector(n, 0.0));
  Vector x = z;
  Vector w(n, 0.0);
  double rho = 1.0 / std::max(0.1 * norm_inf(z), 1e-12);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  double primal = 0.0;
  double dual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    const double kappa = 1.0 / rho;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = z[i] - w[i];
      x[i] = sign_of(v) * std::max(std::abs(v) - kappa, 0.0);
    }
    Vector shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = x[i] + w[i];
    const Vector z_old = z;
    z = projector.project(shifted);
    for (std::size_t i = 0; i < n; ++i) w[i] += x[i] - z[i];

    primal = norm2(subtract(x, z));
    dual = rho * norm2(subtract(z, z_old));
    const double eps_primal = sqrt_n * options.absolute_tolerance +
                              options.relative_tolerance * std::max(norm2(x), norm2(z));
    const double eps_dual =
        sqrt_n * options.absolute_tolerance + options.relative_tolerance * norm2(w);
    if (primal <= eps_primal && dual <= eps_dual) {
      out.converged = true;
      break;
    }
    // Residual balancing; w is the scaled dual and must be rescaled with ρ.
    if (it % 10 == 0) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        for (double& v : w) v /= 2.0;
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        for (double& v : w) v *= 2.0;
      }
    }
  }
  if (!out.converged) throw L1ConvergenceError(options.max_iterations, primal, dual);
  out.z = std::move(z);
  out.residual_norm = norm2(residual_of(phi, q, out.z));
  return out;
}

}  // namespace

L1Solution l1_decode(const Matrix& phi, std::span<const double> q, double radius,
                     const L1Options& options) {
  if (q.size() != phi.rows()) throw std::invalid_argument("l1_decode: q length != rows of Phi");
  if (!(radius >= 0.0)) throw std::invalid_argument("l1_decode: radius must be >= 0");
  switch (options.method) {
    case L1Method::kHomotopy: return solve_homotopy(phi, q, radius, options);
    case L1Method::kAdmm: return solve_admm(phi, q, radius, options);
  }
  return solve_homotopy(phi, q, radius, options);
}

}  // namespace sdcs
