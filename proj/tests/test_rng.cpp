#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsp/rng.hpp"

using namespace gsp;

TEST_CASE("streams are deterministic and independent of interleaving") {
  CounterRng a(7, 3);
  std::vector<double> first;
  for (int i = 0; i < 100; ++i) first.push_back(a.gaussian());
  CounterRng b(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(b.gaussian() == first[i]);
  CounterRng c(7, 4);
  bool all_equal = true;
  for (int i = 0; i < 100; ++i) all_equal = all_equal && (c.gaussian() == first[i]);
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniforms live strictly inside (0,1)") {
  CounterRng g(123, 0);
  for (int i = 0; i < 200000; ++i) {
    const double u = g.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gaussian moments at Monte Carlo accuracy") {
  CounterRng g(2024, 1);
  const int n = 400000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = g.gaussian();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  const double mean = s / n, m2 = s2 / n, m4 = s4 / n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("no obvious correlation between consecutive streams") {
  const int n = 100000;
  double dot = 0.0;
  CounterRng a(55, 10), b(55, 11);
  for (int i = 0; i < n; ++i) dot += a.gaussian() * b.gaussian();
  CHECK(std::abs(dot / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}
