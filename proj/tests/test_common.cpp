#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "skipdisk/common.hpp"

using namespace skipdisk;

TEST_SUITE("common") {

TEST_CASE("error taxonomy maps onto the standard hierarchy") {
  CHECK_THROWS_AS(throw ConfigError("x"), std::invalid_argument);
  CHECK_THROWS_AS(throw ConfigError("x"), std::logic_error);
  CHECK_THROWS_AS(throw DataError("x"), std::runtime_error);
  CHECK_THROWS_AS(throw IoError("x"), std::runtime_error);
  CHECK_THROWS_AS(throw QueueFullError("x"), std::logic_error);
}

TEST_CASE("derive_seed is deterministic and tag-separated") {
  CHECK(derive_seed(42, 1) == derive_seed(42, 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag = 0; tag < 64; ++tag) {
    seen.insert(derive_seed(42, tag));
  }
  CHECK(seen.size() == 64);
  CHECK(derive_seed(1, 3) != derive_seed(2, 3));
}

TEST_CASE("Rng streams are reproducible") {
  Rng a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) and bounded stays under n") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    CHECK(rng.bounded(13) < 13);
  }
}

TEST_CASE("normal and exponential match their moments") {
  Rng rng(99);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  double esum = 0;
  for (int i = 0; i < n; ++i) esum += rng.exponential(5.0);
  CHECK(esum / n == doctest::Approx(5.0).epsilon(0.05));
  CHECK(rng.exponential(0.0) == 0.0);
  CHECK(rng.exponential(-1.0) == 0.0);
}

}  // TEST_SUITE
