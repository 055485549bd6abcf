// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/rng.hpp"

#include <cmath>
#include <numbers>

#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), key_(mix(seed + kGolden)) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ContractError("Rng::index needs n > 0");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<std::size_t>(x % bound);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(seed_, mix(key_ ^ mix(stream * kGolden + 0x632BE59BD9B4E019ULL)));
}

}  // namespace graphfuse
