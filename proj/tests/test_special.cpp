#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsp/special.hpp"

using namespace gsp;

TEST_CASE("cdf basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {-3.0, -1.0, -0.5, 0.0, 0.7, 2.5, 6.0}) {
    CHECK(normal_cdf(x) + normal_ccdf(x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("log ccdf agrees with the asymptotic series deep in the tail") {
  // log ccdf(10) = -50 - log(10 sqrt(2 pi)) + log(1 - 1/100 + 3/10^4 - ...)
  const double x = 10.0;
  const double series = 1.0 - 1e-2 + 3e-4 - 15e-6 + 105e-8 - 945e-10;
  const double expect = -50.0 - std::log(x * std::sqrt(2.0 * M_PI)) + std::log(series);
  CHECK(log_normal_ccdf(x) == doctest::Approx(expect).epsilon(1e-9));
  // smooth across the erfc/series switch: slope there is -x
  const double step = log_normal_ccdf(30.001) - log_normal_ccdf(29.999);
  CHECK(step == doctest::Approx(-30.0 * 0.002).epsilon(1e-4));
  // far tail stays finite and ordered
  CHECK(log_normal_ccdf(100.0) < log_normal_ccdf(50.0));
  CHECK(std::isfinite(log_normal_ccdf(200.0)));
}

TEST_CASE("quantile inverts cdf") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)normal_quantile(0.0), std::domain_error);
}

TEST_CASE("ball probability and its log") {
  CHECK(normal_ball(1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-15));
  for (double x : {1e-12, 1e-6, 0.01, 0.5, 2.0}) {
    CHECK(log_normal_ball(x) == doctest::Approx(std::log(normal_ball(x))).epsilon(1e-9));
  }
}

TEST_CASE("log_sum_exp handles extremes") {
  CHECK(log_sum_exp(-1e9, 0.0) == doctest::Approx(0.0));
  CHECK(log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(log_sum_exp(-inf, -3.0) == doctest::Approx(-3.0));
}

TEST_CASE("sinc near zero") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-5) == doctest::Approx(1.0 - 1e-10 / 6.0).epsilon(1e-14));
  CHECK(sinc(M_PI) == doctest::Approx(0.0).epsilon(1e-15));
}
