#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsp/persistence.hpp"
#include "gsp/rng.hpp"
#include "test_measures.hpp"

using namespace gsp;
using namespace gsp::testing;

TEST_CASE("iid integer persistence: exact small dims and orthant MC") {
  const SpectralMeasure iid = iid_integer();
  PersistenceEstimate e1 = persistence_integer(iid, 1, 1000, {1, 1});
  CHECK(e1.method == EstimateMethod::ExactSmall);
  CHECK(std::exp(e1.log_p) == doctest::Approx(0.5).epsilon(1e-8));

  PersistenceEstimate e10 = persistence_integer(iid, 10, 100000, {2, 1});
  CHECK(e10.method == EstimateMethod::OrthantMC);
  const double p = std::exp(e10.log_p);
  CHECK(std::abs(p - std::pow(2.0, -10.0)) < 3.0 * p * e10.se_log);
}

TEST_CASE("alternating-sign process dies at N=2") {
  PersistenceEstimate e = persistence_integer(atom_pi(), 2, 1000, {3, 1});
  CHECK(e.method == EstimateMethod::ExactSmall);
  CHECK(std::exp(e.log_p) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("continuous persistence on coarse grids reduces to closed forms") {
  const SpectralMeasure sinc_m = sinc_continuous();
  PersistenceEstimate e = persistence_continuous(sinc_m, 1.0, 0.5, 1000, {4, 1});
  CHECK(e.method == EstimateMethod::ExactSmall);
  const double rho = 2.0 / M_PI;
  const double want = 0.25 + std::asin(rho) / (2.0 * M_PI);
  CHECK(std::exp(e.log_p) == doctest::Approx(want).epsilon(1e-7));

  PersistenceEstimate single = persistence_continuous(sinc_m, 1.0, 2.0, 1000, {5, 1});
  CHECK(std::exp(single.log_p) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("pure-cosine process matches the phase-geometry oracle") {
  // f(t) = A cos t + B sin t > 0 on the grid {h,...,Kh} iff the phase lies in an
  // arc of length pi - (t_K - t_1)
  const SpectralMeasure m = atom_one(Domain::ContinuousTime);
  const double N = M_PI, h = 0.25;
  const int K = static_cast<int>(std::floor(N / h + 1e-9));
  const double arc = M_PI - (K * h - h);
  const double want = arc / (2.0 * M_PI);

  // direct phase simulation (the stated oracle)
  CounterRng gen(99, 0);
  const int n = 400000;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = gen.gaussian(), b = gen.gaussian();
    bool pos = true;
    for (int j = 1; j <= K; ++j) {
      if (!(a * std::cos(j * h) + b * std::sin(j * h) > 0.0)) {
        pos = false;
        break;
      }
    }
    hits += pos ? 1 : 0;
  }
  const double sim = static_cast<double>(hits) / n;
  const double se_sim = std::sqrt(sim * (1 - sim) / n);
  CHECK(std::abs(sim - want) < 4.0 * se_sim);

  PersistenceOptions opts;
  opts.method = EstimateMethod::OrthantMC;
  PersistenceEstimate e = persistence_continuous(m, N, h, 200000, {6, 1}, opts);
  const double p = std::exp(e.log_p);
  CHECK(std::abs(p - want) < 4.0 * p * e.se_log + 4.0 * se_sim);
}

TEST_CASE("curve: iid dyadic N and the nesting property") {
  const SpectralMeasure iid = iid_integer();
  auto curve = persistence_curve(iid, {2.0, 4.0, 8.0}, 200000, {7, 1});
  REQUIRE(curve.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE_FALSE(curve[i].failed);
    const double want = -curve[i].N * std::log(2.0);
    CHECK(std::abs(curve[i].estimate.log_p - want) <
          3.0 * std::max(curve[i].estimate.se_log, 1e-7) + 1e-6);
  }
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(curve[i].estimate.log_p <= curve[i - 1].estimate.log_p +
                                         3.0 * (curve[i].estimate.se_log +
                                                curve[i - 1].estimate.se_log) + 1e-6);
  }
  CHECK_THROWS_AS((void)persistence_curve(iid, {4.0, 4.0}, 100, {1, 1}),
                  std::invalid_argument);
}

TEST_CASE("event nesting across N on the gap measure") {
  const SpectralMeasure gap = gap_measure(Domain::IntegerTime);
  auto curve = persistence_curve(gap, {4.0, 8.0, 12.0}, 100000, {8, 1});
  for (std::size_t i = 1; i < curve.size(); ++i) {
    REQUIRE_FALSE(curve[i].failed);
    CHECK(curve[i].estimate.log_p <= curve[i - 1].estimate.log_p +
                                         3.0 * (curve[i].estimate.se_log +
                                                curve[i - 1].estimate.se_log) + 1e-6);
  }
}

TEST_CASE("oracle agreement: genz vs exact for N <= 7") {
  for (const auto& m : {iid_integer(), gap_measure(Domain::IntegerTime), mix_integer(),
                        power_measure(-0.5, Domain::IntegerTime)}) {
    for (int N : {2, 5, 7}) {
      PersistenceOptions exact_opts;
      exact_opts.method = EstimateMethod::ExactSmall;
      PersistenceOptions mc_opts;
      mc_opts.method = EstimateMethod::OrthantMC;
      mc_opts.exact_small_max = 0;  // force the MC estimator even for tiny dims
      PersistenceEstimate ex = persistence_integer(m, N, 0, {9, 1}, exact_opts);
      PersistenceEstimate mc = persistence_integer(m, N, 100000, {10, 1}, mc_opts);
      const double p_ex = std::exp(ex.log_p);
      const double p_mc = std::exp(mc.log_p);
      CHECK(std::abs(p_ex - p_mc) < 3.0 * p_mc * mc.se_log + 1e-6);
    }
  }
}

TEST_CASE("path MC agrees with orthant MC where it can resolve the probability") {
  PersistenceOptions path_opts;
  path_opts.method = EstimateMethod::PathMC;
  PersistenceOptions orth_opts;
  orth_opts.method = EstimateMethod::OrthantMC;

  const SpectralMeasure iid = iid_integer();
  for (int N : {4, 8, 16}) {
    const long n_path = (N == 16) ? 3000000 : 300000;
    PersistenceEstimate pp = persistence_integer(iid, N, n_path, {11, 1}, path_opts);
    PersistenceEstimate po = persistence_integer(iid, N, 100000, {12, 1}, orth_opts);
    CHECK(std::abs(pp.log_p - po.log_p) < 3.0 * (pp.se_log + po.se_log) + 1e-6);
  }
  const SpectralMeasure gap = gap_measure(Domain::IntegerTime);
  for (int N : {2, 4, 6}) {
    PersistenceEstimate pp = persistence_integer(gap, N, 300000, {13, 1}, path_opts);
    PersistenceEstimate po = persistence_integer(gap, N, 100000, {14, 1}, orth_opts);
    CHECK(std::abs(pp.log_p - po.log_p) < 3.0 * (pp.se_log + po.se_log) + 1e-6);
  }
}

TEST_CASE("grid refinement study tightens the estimate monotonically") {
  const SpectralMeasure sinc_m = sinc_continuous();
  RefinementStudy study =
      grid_refinement_study(sinc_m, 2.0, {1.0, 0.5, 0.25}, 200000, {15, 1});
  REQUIRE(study.rows.size() == 3);
  CHECK(study.rows[0].h == 1.0);
  CHECK(study.rows[2].h == 0.25);
  // finer grids impose more constraints: log_p decreases (3 se slack)
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(study.rows[i].estimate.log_p <= study.rows[i - 1].estimate.log_p +
                                              3.0 * (study.rows[i].estimate.se_log +
                                                     study.rows[i - 1].estimate.se_log) +
                                              1e-6);
  }
  CHECK(study.extrapolated);
  // extrapolation self-consistency
  const double fine = study.rows[2].estimate.log_p;
  const double prev = study.rows[1].estimate.log_p;
  const double se = study.rows[2].estimate.se_log + study.rows[1].estimate.se_log;
  CHECK(std::abs(study.log_p_extrapolated - fine) <=
        std::abs(fine - prev) + 3.0 * se + 1e-9);

  RefinementStudy single = grid_refinement_study(sinc_m, 2.0, {0.5}, 10000, {16, 1});
  CHECK(single.rows.size() == 1);
  CHECK_FALSE(single.extrapolated);
}

TEST_CASE("dimension caps and validation errors") {
  const SpectralMeasure iid = iid_integer();
  PersistenceOptions opts;
  opts.orthant_dim_cap = 16;
  CHECK_THROWS_AS((void)persistence_integer(iid, 17, 100, {1, 1}, opts),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)persistence_integer(sinc_continuous(), 4, 100, {1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)persistence_continuous(iid, 4.0, 0.5, 100, {1, 1}),
                  std::invalid_argument);
}

TEST_CASE("curve CSV format") {
  const SpectralMeasure iid = iid_integer();
  auto curve = persistence_curve(iid, {2.0, 4.0}, 1000, {17, 1});
  const std::string csv = curve_to_csv(curve, EstimateMethod::OrthantMC, 17);
  CHECK(csv.find("N,log_p,se_log,method,grid_step,n_samples,seed") == 0);
  CHECK(csv.find("\n2,") != std::string::npos);
  CHECK(csv.find("\n4,") != std::string::npos);
}
