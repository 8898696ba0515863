#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "tahqiq/rng.hpp"

using tahqiq::Rng;
using tahqiq::splitmix64;

TEST_CASE("splitmix64: pinned values from the reference sequence") {
  // First three outputs of Vigna's splitmix64 stream seeded with 0;
  // splitmix64(k * gamma) is the (k+1)-th stream output.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
  CHECK(splitmix64(2 * 0x9E3779B97F4A7C15ULL) == 0x06C45D188009454FULL);
  CHECK(splitmix64(1) != splitmix64(2));
}

TEST_CASE("rng: determinism for equal seeds, divergence for different seeds") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.u64() == b.u64());
  }
  bool any_diff = false;
  Rng a2(42);
  for (int i = 0; i < 100; ++i) any_diff = any_diff || (a2.u64() != c.u64());
  CHECK(any_diff);
}

TEST_CASE("rng: uniform() stays in [0,1) and below(n) stays in range") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    std::uint64_t v = rng.below(17);
    CHECK(v < 17);
  }
  CHECK(rng.below(1) == 0);
}

TEST_CASE("rng: below(n) is close to uniform over residues") {
  Rng rng(99);
  const std::uint64_t n = 10;
  std::vector<int> counts(n, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[rng.below(n)]++;
  for (std::uint64_t r = 0; r < n; ++r) {
    CHECK(counts[r] > draws / static_cast<int>(n) - 600);
    CHECK(counts[r] < draws / static_cast<int>(n) + 600);
  }
}

TEST_CASE("rng: shuffle is a permutation and deterministic per seed") {
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  Rng rng(5);
  rng.shuffle(v);
  std::vector<int> w = v;
  std::sort(w.begin(), w.end());
  for (int i = 0; i < 100; ++i) CHECK(w[i] == i);

  std::vector<int> v2(100);
  std::iota(v2.begin(), v2.end(), 0);
  Rng rng2(5);
  rng2.shuffle(v2);
  CHECK(v == v2);
}

TEST_CASE("rng: sample_without_replacement returns k sorted distinct indices") {
  Rng rng(11);
  auto s = rng.sample_without_replacement(50, 12);
  CHECK(s.size() == 12);
  CHECK(std::is_sorted(s.begin(), s.end()));
  std::set<std::size_t> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 12);
  for (auto i : uniq) CHECK(i < 50);

  auto all = rng.sample_without_replacement(5, 5);
  CHECK(all == std::vector<std::size_t>({0, 1, 2, 3, 4}));
}

TEST_CASE("rng: gaussian has roughly zero mean and unit variance") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
