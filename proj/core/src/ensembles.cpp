#include "sdcs/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdcs/linalg.hpp"
#include "sdcs/noise_shaper.hpp"
#include "sdcs/parallel.hpp"
#include "sdcs/random.hpp"

namespace sdcs {

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::kGaussianUnit: return "gaussian";
    case Ensemble::kGaussianScaled: return "gaussian_scaled";
    case Ensemble::kBernoulli: return "bernoulli";
  }
  return "gaussian";
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "gaussian" || name == "gaussian_unit") return Ensemble::kGaussianUnit;
  if (name == "gaussian_scaled") return Ensemble::kGaussianScaled;
  if (name == "bernoulli") return Ensemble::kBernoulli;
  throw std::invalid_argument("unknown ensemble '" + name + "'");
}

Matrix sample_matrix(const EnsembleSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0) throw std::invalid_argument("sample_matrix: empty shape");
  CounterRng rng(spec.seed);
  std::vector<double> data(spec.rows * spec.cols);
  const double scale =
      spec.kind == Ensemble::kGaussianScaled ? 1.0 / std::sqrt(static_cast<double>(spec.rows)) : 1.0;
  for (double& v : data) {
    v = spec.kind == Ensemble::kBernoulli ? rng.rademacher() : scale * rng.gaussian();
  }
  return Matrix(spec.rows, spec.cols, std::move(data));
}

std::string to_string(MagnitudeModel m) {
  return m == MagnitudeModel::kConstantUnitNorm ? "constant" : "gaussian";
}

MagnitudeModel parse_magnitude_model(const std::string& name) {
  if (name == "constant") return MagnitudeModel::kConstantUnitNorm;
  if (name == "gaussian") return MagnitudeModel::kGaussian;
  throw std::invalid_argument("unknown signal model '" + name + "'");
}

SparseSignal sample_signal(const SignalSpec& spec) {
  if (spec.sparsity == 0 || spec.sparsity > spec.dimension) {
    throw std::invalid_argument("sample_signal: need 1 <= k <= N");
  }
  CounterRng rng(spec.seed);
  auto support = random_subset(rng, spec.dimension, spec.sparsity);
  Vector values(spec.sparsity);
  if (spec.model == MagnitudeModel::kConstantUnitNorm) {
    std::fill(values.begin(), values.end(), 1.0 / std::sqrt(static_cast<double>(spec.sparsity)));
  } else {
    for (double& v : values) {
      do {
        v = rng.gaussian();
      } while (std::abs(v) < spec.min_magnitude || v == 0.0);
    }
  }
  return SparseSignal(spec.dimension, std::move(support), std::move(values));
}

namespace {

std::size_t rows_for(double lambda, std::size_t k) {
  const double m = lambda * static_cast<double>(k);
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 || rounded < 1.0) {
    throw std::invalid_argument("lambda*k must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

double sigma_min_trial(int order, std::size_t m, std::size_t k, Ensemble ensemble,
                       std::uint64_t seed) {
  const Matrix e = sample_matrix({ensemble, m, k, seed});
  const Matrix shaped = apply_inverse_power(NoiseShaper::difference(1), order, e);
  return singular_values(shaped).min();
}

std::vector<SigmaMinRow> sigma_min_study(int order, std::size_t k, std::span<const double> lambdas,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t threads) {
  if (trials == 0) throw std::invalid_argument("sigma_min_study: trials must be >= 1");
  std::vector<SigmaMinRow> rows;
  for (double lambda : lambdas) {
    const std::size_t m = rows_for(lambda, k);
    if (m < k) throw std::invalid_argument("sigma_min_study: lambda must be >= 1");
    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
      values[t] = sigma_min_trial(order, m, k, Ensemble::kGaussianScaled,
                                  derive_seed(seed, {static_cast<std::uint64_t>(m), k, t}));
    });
    SigmaMinRow row;
    row.lambda = lambda;
    row.m = m;
    row.trials = trials;
    row.min = *std::min_element(values.begin(), values.end());
    row.max = *std::max_element(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    row.mean = total / static_cast<double>(trials);
    row.worst_inverse = 1.0 / row.min;
    rows.push_back(row);
  }
  return rows;
}

std::vector<InfNormRow> inf_norm_study(std::size_t k, std::span<const double> lambdas,
                                       std::size_t trials, std::uint64_t seed, double alpha,
                                       Ensemble ensemble, std::size_t threads) {
  if (trials == 0) throw std::invalid_argument("inf_norm_study: trials must be >= 1");
  std::vector<InfNormRow> rows;
  for (double lambda : lambdas) {
    const std::size_t m = rows_for(lambda, k);
    const double norm = std::sqrt(static_cast<double>(m) * static_cast<double>(k));
    std::vector<double> ratios(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
      const Matrix e = sample_matrix(
          {ensemble, m, k, derive_seed(seed, {static_cast<std::uint64_t>(m), k, t, 0x1f})});
      ratios[t] = operator_norm_inf(e) / norm;
    });
    InfNormRow row;
    row.lambda = lambda;
    row.m = m;
    row.trials = trials;
    row.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    double total = 0.0;
    for (double v : ratios) total += v;
    row.mean_ratio = total / static_cast<double>(trials);
    row.envelope = std::pow(lambda, -alpha / 2.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sdcs
