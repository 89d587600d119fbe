#include <benchmark/benchmark.h>

#include <cmath>

#include "sdcs/decoders.hpp"
#include "sdcs/dual_frames.hpp"
#include "sdcs/ensembles.hpp"
#include "sdcs/l1_decoder.hpp"
#include "sdcs/quantizers.hpp"
#include "sdcs/spectral.hpp"
#include "sdcs/svd.hpp"

using namespace sdcs;

static void BM_JacobiSvd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = sample_matrix({Ensemble::kGaussianUnit, n, n / 4, 1});
  for (auto _ : state) benchmark::DoNotOptimize(singular_values(a));
}
BENCHMARK(BM_JacobiSvd)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_DifferenceSpectrumExtended(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::numerical_singular_values_dpow(2, m));
}
BENCHMARK(BM_DifferenceSpectrumExtended)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SigmaDelta(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  Vector y(4096);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(0.01 * double(i)) * 3.0;
  const Alphabet a = Alphabet::unbounded(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_delta_quantize(y, order, a));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(y.size()));
}
BENCHMARK(BM_SigmaDelta)->DenseRange(1, 4);

static void BM_L1Decode(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 1024, k = 10;
  const Matrix phi = sample_matrix({Ensemble::kGaussianUnit, m, n, 2});
  const SparseSignal x = sample_signal({n, k, MagnitudeModel::kConstantUnitNorm, 3, 0.0});
  const auto q = sigma_delta_quantize(multiply(phi, x.dense()), 1, Alphabet::unbounded(0.01));
  const double eps = quantization_radius(1, 0.01, m);
  L1Options options;
  options.method = state.range(1) ? L1Method::kAdmm : L1Method::kHomotopy;
  for (auto _ : state) benchmark::DoNotOptimize(l1_decode(phi, q.q, eps, options));
}
BENCHMARK(BM_L1Decode)->Args({200, 0})->Args({600, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

static void BM_HDual(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix e = sample_matrix({Ensemble::kGaussianUnit, m, 10, 4});
  const auto shaper = NoiseShaper::difference(2);
  for (auto _ : state) benchmark::DoNotOptimize(h_dual(e, shaper));
}
BENCHMARK(BM_HDual)->Arg(100)->Arg(1000);
BENCHMARK_MAIN();
