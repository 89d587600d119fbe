#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace sdcs {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Folds a base seed and a list of indices (cell parameters, trial number, …)
// into an independent 64-bit seed. Used to key every Monte Carlo trial so
// results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

// Counter-based generator: the i-th output is mix64(key + i·φ64), the
// SplitMix64 sequence. Any output can be recomputed from (key, i) alone, so
// streams are reproducible bit for bit on every platform. Normal variates use
// Box–Muller on the generator's own uniforms rather than <random>
// distributions, whose algorithms are implementation-defined.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double gaussian();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  // ±1 with equal probability.
  double rademacher();

  std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Uniformly random k-subset of {0, …, n−1}, sorted ascending.
std::vector<std::size_t> random_subset(CounterRng& rng, std::size_t n, std::size_t k);

}  // namespace sdcs
