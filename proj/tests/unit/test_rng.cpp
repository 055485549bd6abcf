// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "graphfuse/errors.hpp"
#include "graphfuse/rng.hpp"

using graphfuse::Rng;

TEST_CASE("rng: same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);
}

TEST_CASE("rng: different seeds diverge") {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("rng: split leaves the parent untouched and is reproducible") {
  Rng parent(7);
  parent.next_u64();
  const auto before = parent.counter();
  Rng c1 = parent.split(3);
  Rng c2 = parent.split(3);
  Rng other = parent.split(4);
  CHECK(parent.counter() == before);
  const auto x = c1.next_u64();
  CHECK(x == c2.next_u64());
  CHECK(x != other.next_u64());

  // The child does not depend on how far the parent has advanced.
  Rng fresh(7);
  CHECK(fresh.split(3).next_u64() == x);
}

TEST_CASE("rng: uniform stays in [0, 1) with mean near 1/2") {
  Rng r(5);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng: normal has roughly zero mean and unit variance") {
  Rng r(9);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("rng: index covers [0, n) and rejects n = 0") {
  Rng r(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = r.index(7);
    REQUIRE(k < 7);
    ++hits[k];
  }
  for (int h : hits) CHECK(h > 800);
  CHECK_THROWS_AS(r.index(0), graphfuse::ContractError);
}

TEST_CASE("rng: shuffle is a permutation and depends only on the seed") {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  std::vector<int> b(a);
  Rng r1(3), r2(3);
  r1.shuffle(a.begin(), a.end());
  r2.shuffle(b.begin(), b.end());
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}
