#include <gtest/gtest.h>

#include <cmath>

#include "sdcs/decoders.hpp"
#include "sdcs/ensembles.hpp"
#include "sdcs/quantizers.hpp"
#include "sdcs/random.hpp"
#include "test_support.hpp"

using namespace sdcs;

TEST(SparseSignal, Validation) {
  EXPECT_THROW(SparseSignal(5, {1, 1}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(SparseSignal(5, {3, 1}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(SparseSignal(5, {5}, {1}), std::invalid_argument);
  EXPECT_THROW(SparseSignal(5, {1}, {0.0}), std::invalid_argument);
  EXPECT_THROW(SparseSignal(5, {1, 2}, {1.0}), std::invalid_argument);
  const SparseSignal x(5, {0, 3}, {2.0, -0.5});
  EXPECT_EQ(x.dense(), (Vector{2, 0, 0, -0.5, 0}));
  EXPECT_EQ(x.min_magnitude(), 0.5);
}

TEST(EstimateSupport, LargestEntriesSorted) {
  EXPECT_EQ(estimate_support(Vector{5, 0.1, 3, 0}, 2, 2), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(estimate_support(Vector{-5, 0.1, 3, 0}, 2, 3), (std::vector<std::size_t>{0, 1, 2}));
  // ties at the cut go to the smaller index
  EXPECT_EQ(estimate_support(Vector{1, 2, 1, 1}, 2, 2), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(estimate_support(Vector{1, 2, 3}, 3, 3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(estimate_support(Vector{1, 2, 3}, 2, 1), std::invalid_argument);
  EXPECT_THROW(estimate_support(Vector{1, 2, 3}, 2, 3), std::invalid_argument);
}

TEST(EstimateSupport, Margin) {
  EXPECT_DOUBLE_EQ(support_margin(7, 7), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(support_margin(2, 4), std::sqrt(1.0 + 1.0 / 3.0));
  EXPECT_THROW(support_margin(3, 2), std::invalid_argument);
}

TEST(EstimateSupport, MonteCarloGuarantees) {
  // (i) ‖x_{T∖T′}‖₂ ≤ (1 + k/k′)^{1/2}·η and (ii) T ⊆ T′ when min|x_T| > γη,
  // for planted perturbations with ‖x − x′‖₂ = η.
  CounterRng rng(2024);
  std::size_t covered_cases = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const std::size_t n = 10 + rng.below(30);
    const std::size_t k = 1 + rng.below(5);
    const std::size_t kp = k + rng.below(std::min<std::size_t>(4, n - k));
    Vector x(n, 0.0);
    const auto t = random_subset(rng, n, k);
    for (std::size_t j : t) x[j] = rng.gaussian() * 3.0;
    Vector e(n);
    for (double& v : e) v = rng.gaussian();
    const double eta = 0.2 + rng.uniform() * 2.0;
    const double ne = norm2(e);
    Vector xp(n);
    for (std::size_t i = 0; i < n; ++i) xp[i] = x[i] + e[i] * eta / ne;

    const auto tp = estimate_support(xp, k, kp);
    double missed = 0.0;
    for (std::size_t j : t) {
      if (!std::binary_search(tp.begin(), tp.end(), j)) missed += x[j] * x[j];
    }
    ASSERT_LE(std::sqrt(missed), std::sqrt(1.0 + double(k) / double(kp)) * eta * (1 + 1e-12));

    double minabs = 1e300;
    for (std::size_t j : t) minabs = std::min(minabs, std::abs(x[j]));
    if (minabs > support_margin(k, kp) * eta) {
      ++covered_cases;
      ASSERT_EQ(missed, 0.0) << "trial " << trial;
    }
  }
  EXPECT_GT(covered_cases, 1000u);
}

TEST(QuantizationRadius, Values) {
  EXPECT_DOUBLE_EQ(quantization_radius(0, 0.01, 100), 0.005 * 10);
  EXPECT_DOUBLE_EQ(quantization_radius(1, 0.01, 100), 0.01 * 10);
  EXPECT_DOUBLE_EQ(quantization_radius(3, 0.01, 400), 0.04 * 20);
}

namespace {

struct Instance {
  Matrix phi;
  SparseSignal x;
  Vector y;
};

Instance make_instance(std::size_t m, std::size_t n, std::size_t k, std::uint64_t seed) {
  Matrix phi = sample_matrix({Ensemble::kGaussianUnit, m, n, seed});
  SparseSignal x = sample_signal({n, k, MagnitudeModel::kConstantUnitNorm, seed + 1, 0.0});
  Vector y = multiply(phi, x.dense());
  return {std::move(phi), std::move(x), std::move(y)};
}

}  // namespace

TEST(TwoStage, ConsistentDataRecoversExactly) {
  const auto in = make_instance(60, 200, 5, 11);
  const auto r = two_stage_recover(in.phi, in.y, 5, 1e-12, NoiseShaper::difference(1), {}, &in.x);
  EXPECT_TRUE(r.support_exact);
  EXPECT_LE(*r.fine_error, 1e-9);
  for (std::size_t j = 0; j < 200; ++j) {
    if (!std::binary_search(r.support.begin(), r.support.end(), j)) EXPECT_EQ(r.fine[j], 0.0);
  }
}

TEST(TwoStage, SigmaDeltaBeatsPcmCoarse) {
  const std::size_t m = 400, n = 512, k = 10;
  double sd_total = 0.0, pcm_total = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto in = make_instance(m, n, k, 40 + 2 * s);
    const auto sd = sigma_delta_quantize(in.y, 1, Alphabet::unbounded(0.01));
    const auto pcm = pcm_quantize(in.y, Alphabet::unbounded(0.01));
    const auto rs = two_stage_recover(in.phi, sd.q, k, 0.01, NoiseShaper::difference(1), {}, &in.x);
    const auto rp = two_stage_recover(in.phi, pcm.q, k, 0.01, NoiseShaper::identity(), {}, &in.x);
    EXPECT_LT(*rs.fine_error, *rp.coarse_error);
    sd_total += *rs.fine_error;
    pcm_total += *rp.coarse_error;
  }
  EXPECT_LT(sd_total, pcm_total);
}

TEST(TwoStage, PerTrialInvariants) {
  for (int r = 0; r <= 2; ++r) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto in = make_instance(150, 300, 6, 70 + 2 * s + 10 * r);
      const auto shaper = r == 0 ? NoiseShaper::identity() : NoiseShaper::difference(r);
      const auto qr = shape_quantize(in.y, shaper, Alphabet::unbounded(0.01));
      const auto rec = two_stage_recover(in.phi, qr.q, 6, 0.01, shaper, {}, &in.x);
      // truth is feasible for the coarse program
      EXPECT_LE(norm2(subtract(in.y, qr.q)), rec.radius);
      EXPECT_LE(norm1(rec.coarse), norm1(in.x.dense()) * (1 + 1e-4));
      if (rec.support_exact) {
        EXPECT_LE(*rec.fine_error, norm2(qr.u) / rec.sigma_min * (1 + 1e-9));
      }
    }
  }
}

TEST(TwoStage, SkipFineReturnsCoarse) {
  const auto in = make_instance(80, 160, 4, 90);
  const auto qr = sigma_delta_quantize(in.y, 2, Alphabet::unbounded(0.01));
  RecoveryOptions o;
  o.skip_fine = true;
  const auto r = two_stage_recover(in.phi, qr.q, 4, 0.01, NoiseShaper::difference(2), o, &in.x);
  EXPECT_EQ(r.fine, r.coarse);
  EXPECT_EQ(r.sigma_min, 0.0);
}

TEST(TwoStage, SlackSupportStillCoversTruth) {
  const auto in = make_instance(120, 256, 5, 95);
  const auto qr = sigma_delta_quantize(in.y, 1, Alphabet::unbounded(0.01));
  RecoveryOptions o;
  o.k_prime = 8;
  const auto r = two_stage_recover(in.phi, qr.q, 5, 0.01, NoiseShaper::difference(1), o, &in.x);
  EXPECT_EQ(r.support.size(), 8u);
  for (std::size_t j : in.x.support()) EXPECT_TRUE(std::binary_search(r.support.begin(), r.support.end(), j));
  EXPECT_LE(*r.fine_error, 0.05);
}

TEST(TwoStage, RejectsScaledMatrix) {
  const Matrix phi = sample_matrix({Ensemble::kGaussianScaled, 100, 200, 3});
  EXPECT_THROW(two_stage_recover(phi, Vector(100, 0.0), 3, 0.01, NoiseShaper::identity()),
               std::invalid_argument);
  RecoveryOptions o;
  o.check_normalization = false;
  EXPECT_NO_THROW(two_stage_recover(phi, Vector(100, 0.0), 3, 0.01, NoiseShaper::identity(), o));
}
