// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>

namespace graphfuse {

/// Counter-based generator: the n-th draw is a SplitMix64 finalizer applied
/// to (key + n * golden). `split` derives an independent child stream, so
/// stochastic operations can be handed their own generator without
/// disturbing the parent's sequence.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter";

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Unbiased integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Child stream keyed by `stream`; does not advance this generator.
  Rng split(std::uint64_t stream) const;

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = index(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  Rng(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace graphfuse
