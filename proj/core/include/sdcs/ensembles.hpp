#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdcs/decoders.hpp"
#include "sdcs/matrix.hpp"

namespace sdcs {

// Entry distributions for measurement matrices and frames.
//   kGaussianUnit    N(0, 1): the unit-variance convention used for Φ so
//                    that the quantizer step need not depend on m.
//   kGaussianScaled  N(0, 1/m): columns have roughly unit norm.
//   kBernoulli       ±1 with equal probability.
enum class Ensemble { kGaussianUnit, kGaussianScaled, kBernoulli };

std::string to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& name);

struct EnsembleSpec {
  Ensemble kind = Ensemble::kGaussianUnit;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
};

// Row-major fill from one CounterRng stream keyed by the seed, so a matrix
// with more rows extends one with fewer rows (same seed, same cols).
Matrix sample_matrix(const EnsembleSpec& spec);

enum class MagnitudeModel {
  kConstantUnitNorm,  // every nonzero equals 1/√k, so ‖x‖₂ = 1
  kGaussian,          // i.i.d. N(0, 1) nonzeros
};

std::string to_string(MagnitudeModel m);
MagnitudeModel parse_magnitude_model(const std::string& name);

struct SignalSpec {
  std::size_t dimension = 0;
  std::size_t sparsity = 0;
  MagnitudeModel model = MagnitudeModel::kConstantUnitNorm;
  std::uint64_t seed = 0;
  // Gaussian model only: redraw any entry with |x_j| below this floor.
  double min_magnitude = 0.0;
};

// Support drawn uniformly among k-subsets.
SparseSignal sample_signal(const SignalSpec& spec);

struct SigmaMinRow {
  double lambda = 0.0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double worst_inverse = 0.0;  // max over trials of 1/σ_min
};

// σ_min(D^{-r}E) for E ~ N(0, 1/m), m = λk, over `trials` draws per λ.
std::vector<SigmaMinRow> sigma_min_study(int order, std::size_t k, std::span<const double> lambdas,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t threads = 0);

// σ_min(D^{-r}E) for one draw; the building block of sigma_min_study.
double sigma_min_trial(int order, std::size_t m, std::size_t k, Ensemble ensemble,
                       std::uint64_t seed);

struct InfNormRow {
  double lambda = 0.0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double max_ratio = 0.0;   // max over trials of ‖E‖_{∞→∞}/√(mk)
  double mean_ratio = 0.0;
  double envelope = 0.0;    // λ^{−α/2}
};

// ‖E‖_{∞→∞}·(mk)^{−1/2} for m×k matrices from `ensemble` (unit scaling).
std::vector<InfNormRow> inf_norm_study(std::size_t k, std::span<const double> lambdas,
                                       std::size_t trials, std::uint64_t seed, double alpha,
                                       Ensemble ensemble = Ensemble::kGaussianUnit,
                                       std::size_t threads = 0);

}  // namespace sdcs
