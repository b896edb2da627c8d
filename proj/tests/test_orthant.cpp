#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsp/orthant.hpp"
#include "gsp/quadrature.hpp"
#include "gsp/rng.hpp"
#include "gsp/special.hpp"

using namespace gsp;

namespace {

Eigen::MatrixXd equicorrelated(int n, double rho) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// independent oracle for equicorrelated orthants via the common-factor integral
// P = E_z[ Phi( sqrt(rho/(1-rho)) z )^n ]
double equicorr_oracle(int n, double rho) {
  const double a = std::sqrt(rho / (1.0 - rho));
  auto f = [&](double z) {
    return normal_pdf(z) * std::pow(normal_cdf(a * z), n);
  };
  double lo = -10.0, hi = 10.0;
  return integrate(f, lo, hi, 1e-12, 400000).value;
}

Eigen::MatrixXd random_correlation(CounterRng& gen, int n) {
  // A A^T normalized: PD with probability one
  Eigen::MatrixXd a(n, n + 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + 2; ++j) a(i, j) = gen.gaussian();
  Eigen::MatrixXd s = a * a.transpose();
  Eigen::VectorXd d = s.diagonal().cwiseSqrt();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) /= d(i) * d(j);
  return s;
}

}  // namespace

TEST_CASE("closed forms in dimensions 1..3") {
  CHECK(exact_orthant_small(Eigen::MatrixXd::Identity(1, 1)) == doctest::Approx(0.5));
  CHECK(exact_orthant_small(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(0.25));
  CHECK(exact_orthant_small(equicorrelated(3, 0.5)) == doctest::Approx(0.25).epsilon(1e-12));
  // degenerate two-point alternating case: rho = -1 gives zero
  Eigen::MatrixXd deg(2, 2);
  deg << 1.0, -1.0, -1.0, 1.0;
  CHECK(exact_orthant_small(deg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Plackett route reproduces 1/(n+1) for equicorrelation 1/2") {
  for (int n = 4; n <= 7; ++n) {
    const double p = exact_orthant_small(equicorrelated(n, 0.5), 1e-8);
    CHECK(p == doctest::Approx(1.0 / (n + 1.0)).epsilon(2e-7));
  }
}

TEST_CASE("Plackett route matches the common-factor oracle on equicorrelated matrices") {
  for (double rho : {0.1, 0.3, 0.7}) {
    for (int n : {4, 5, 6}) {
      const double p = exact_orthant_small(equicorrelated(n, rho), 1e-8);
      CHECK(p == doctest::Approx(equicorr_oracle(n, rho)).epsilon(1e-6));
    }
  }
}

TEST_CASE("Plackett route matches MC on random PD matrices (dims 4..7)") {
  CounterRng gen(2718, 0);
  for (int n = 4; n <= 7; ++n) {
    Eigen::MatrixXd r = random_correlation(gen, n);
    const double p = exact_orthant_small(r, 1e-8);
    MvnEstimate mc = genz_orthant(r, 200000, {91, 1});
    const double se_p = std::exp(mc.log_p) * mc.se_log;
    CHECK(std::abs(p - std::exp(mc.log_p)) < 4.0 * se_p + 1e-7);
  }
}

TEST_CASE("genz orthant on independent coordinates") {
  MvnEstimate est = genz_orthant(Eigen::MatrixXd::Identity(10, 10), 100000, {17, 1});
  CHECK(std::abs(est.log_p - (-10.0 * std::log(2.0))) < 3.0 * est.se_log + 1e-9);
  CHECK_FALSE(est.low_confidence);
}

TEST_CASE("genz matches bivariate and trivariate closed forms") {
  Eigen::MatrixXd b = equicorrelated(2, 0.5);
  MvnEstimate est = genz_orthant(b, 200000, {18, 1});
  const double want = 1.0 / 3.0;  // 1/4 + asin(0.5)/(2 pi)
  CHECK(std::abs(std::exp(est.log_p) - want) < 3.0 * want * est.se_log + 1e-9);

  Eigen::MatrixXd t = equicorrelated(3, 0.5);
  MvnEstimate est3 = genz_orthant(t, 200000, {19, 1});
  CHECK(std::abs(std::exp(est3.log_p) - 0.25) < 3.0 * 0.25 * est3.se_log + 1e-9);
}

TEST_CASE("genz handles deep orthants in log space") {
  // dim 64 identity: log p = -64 log 2 ~ -44.4, far below linear-scale MC reach
  MvnEstimate est = genz_orthant(Eigen::MatrixXd::Identity(64, 64), 50000, {20, 1});
  CHECK(std::abs(est.log_p - (-64.0 * std::log(2.0))) < 3.0 * est.se_log + 1e-9);
  CHECK(est.se_log < 0.05);
}

TEST_CASE("serial reference and OpenMP kernel produce identical estimates") {
  Eigen::MatrixXd r = equicorrelated(12, 0.4);
  std::vector<double> lo(12, 0.0), hi(12, std::numeric_limits<double>::infinity());
  MvnEstimate a = mvn_box_mc(r, lo, hi, 40000, {55, 1}, true);
  MvnEstimate b = mvn_box_mc_serial(r, lo, hi, 40000, {55, 1});
  CHECK(a.log_p == b.log_p);
  CHECK(a.se_log == b.se_log);
  CHECK(a.n_samples == b.n_samples);
}

TEST_CASE("box probabilities: ball event on a correlated pair") {
  // P(|X| <= 1, |Y| <= 1) for rho = 0.9 against a fine deterministic quadrature
  Eigen::MatrixXd s = equicorrelated(2, 0.9);
  std::vector<double> lo(2, -1.0), hi(2, 1.0);
  MvnEstimate est = mvn_box_mc(s, lo, hi, 200000, {77, 1});
  auto f = [&](double x) {
    const double sd = std::sqrt(1.0 - 0.81);
    return normal_pdf(x) *
           (normal_cdf((1.0 - 0.9 * x) / sd) - normal_cdf((-1.0 - 0.9 * x) / sd));
  };
  const double want = integrate(f, -1.0, 1.0, 1e-12).value;
  CHECK(std::abs(std::exp(est.log_p) - want) < 4.0 * want * est.se_log + 1e-9);
}

TEST_CASE("exact orthant rejects bad inputs") {
  CHECK_THROWS_AS((void)exact_orthant_small(Eigen::MatrixXd::Identity(8, 8)),
                  std::invalid_argument);
  Eigen::MatrixXd nearly = equicorrelated(4, -0.5);  // eigenvalue 1 - 4*0.5 < 0
  CHECK_THROWS_AS((void)exact_orthant_small(nearly), std::domain_error);
}

TEST_CASE("slepian-style monotonicity of the closed forms") {
  // increasing one off-diagonal entry never decreases the orthant probability
  CounterRng gen(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const double r1 = -0.9 + 1.8 * gen.uniform();
    const double r2 = std::min(0.999, r1 + 0.3 * gen.uniform());
    Eigen::MatrixXd a = equicorrelated(2, r1), b = equicorrelated(2, r2);
    CHECK(exact_orthant_small(b) >= exact_orthant_small(a) - 1e-12);
    // trivariate: bump one entry keeping PD
    Eigen::MatrixXd t = equicorrelated(3, 0.2);
    Eigen::MatrixXd t2 = t;
    t2(0, 1) = t2(1, 0) = 0.2 + 0.5 * gen.uniform();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t2, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 1e-6)
      CHECK(exact_orthant_small(t2) >= exact_orthant_small(t) - 1e-12);
  }
}
