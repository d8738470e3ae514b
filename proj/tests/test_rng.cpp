#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "vibraug/rng.hpp"

using vibraug::RngStream;

TEST_CASE("same seed and stream replay the same sequence") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams from one seed diverge") {
  RngStream a(42, 1), b(42, 2);
  int agree = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++agree;
  REQUIRE(agree == 0);
}

TEST_CASE("different seeds diverge on the same stream") {
  RngStream a(1, 7), b(2, 7);
  int agree = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++agree;
  REQUIRE(agree == 0);
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  RngStream rng(123, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  REQUIRE(lo < 0.01);
  REQUIRE(hi > 0.99);
}

TEST_CASE("uniform respects custom bounds") {
  RngStream rng(9, 3);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform(-2.5, 4.0);
    REQUIRE(u >= -2.5);
    REQUIRE(u < 4.0);
  }
}

TEST_CASE("uniform_int covers its range without bias artifacts") {
  RngStream rng(5, 11);
  std::set<std::uint64_t> seen;
  int counts[7] = {0};
  for (int i = 0; i < 70000; ++i) {
    auto v = rng.uniform_int(7);
    REQUIRE(v < 7);
    seen.insert(v);
    counts[v]++;
  }
  REQUIRE(seen.size() == 7);
  for (int c : counts) REQUIRE(c > 8000);  // expectation 10000
  REQUIRE_THROWS_AS(rng.uniform_int(0), vibraug::Error);
}

TEST_CASE("normal deviates have the requested moments") {
  RngStream rng(77, 1);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(1.5, 2.0);
    sum += x;
    sum_sq += x * x;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  REQUIRE(std::abs(mean - 1.5) < 0.02);       // sigma/sqrt(n) ~ 0.0045
  REQUIRE(std::abs(std::sqrt(var) - 2.0) < 0.02);
}

TEST_CASE("normal with zero sigma returns the mean exactly") {
  RngStream rng(1, 1);
  REQUIRE(rng.normal(3.25, 0.0) == 3.25);
}

TEST_CASE("seed and stream id are preserved") {
  RngStream rng(42, vibraug::streams::augment | 5);
  REQUIRE(rng.seed() == 42);
  REQUIRE(rng.stream_id() == (vibraug::streams::augment | 5));
}
