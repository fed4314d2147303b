#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "riskcal/rng.hpp"

using riskcal::Rng;

TEST_SUITE("rng") {

TEST_CASE("identical seeds give identical streams") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1);
  Rng b(2);
  int differing = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() != b.next_u64()) ++differing;
  }
  CHECK(differing > 32);
}

TEST_CASE("uniform stays in [0,1) with a centered mean") {
  Rng rng(7);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("below stays in range and covers every value") {
  Rng rng(9);
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = rng.below(5);
    REQUIRE(v < 5);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) CHECK(c > 9000);
  Rng one(1);
  for (int i = 0; i < 100; ++i) CHECK(one.below(1) == 0);
}

TEST_CASE("bernoulli at the degenerate rates") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) CHECK(rng.bernoulli(1.0));
  for (int i = 0; i < 200; ++i) CHECK_FALSE(rng.bernoulli(0.0));
}

TEST_CASE("bernoulli frequency tracks the rate") {
  Rng rng(5);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(std::fabs(ones / static_cast<double>(n) - 0.3) < 0.01);
}

TEST_CASE("normal has zero mean and unit variance") {
  Rng rng(11);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("gamma moments match shape on both sampler paths") {
  const int n = 200000;
  for (double shape : {2.5, 0.5}) {
    CAPTURE(shape);
    Rng rng(13);
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      REQUIRE(x > 0.0);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::fabs(mean - shape) < 0.03 * shape + 0.01);
    CHECK(std::fabs(var - shape) < 0.05 * shape + 0.02);
  }
}

TEST_CASE("beta stays in (0,1) with the right mean") {
  Rng rng(17);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(2.0, 5.0);
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(mean - 2.0 / 7.0) < 0.005);
  CHECK(std::fabs(var - 10.0 / (49.0 * 8.0)) < 0.002);
}

}  // TEST_SUITE
