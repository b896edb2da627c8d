#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "gsp/fft.hpp"
#include "gsp/sampler.hpp"
#include "test_measures.hpp"

using namespace gsp;
using namespace gsp::testing;

namespace {

// empirical covariance at a fixed index pair across paths
double emp_cov(const std::vector<SamplePath>& paths, int i, int j) {
  double s = 0.0;
  for (const auto& p : paths) s += p.values[i] * p.values[j];
  return s / static_cast<double>(paths.size());
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("cov_matrix closed cases") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 3};
  Eigen::MatrixXd id = cov_matrix(iid_integer(), g);
  CHECK((id - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::MatrixXd a = cov_matrix(atom_one(Domain::IntegerTime), g);
  CHECK(a(0, 0) == doctest::Approx(1.0));
  CHECK(a(0, 1) == doctest::Approx(std::cos(1.0)));
  CHECK(a(0, 2) == doctest::Approx(std::cos(2.0)));
  CHECK(a(1, 2) == doctest::Approx(std::cos(1.0)));

  PathGrid gc{Domain::ContinuousTime, 0.0, 0.5, 3};
  Eigen::MatrixXd s = cov_matrix(sinc_continuous(), gc);
  CHECK(s(0, 1) == doctest::Approx(2.0 / M_PI).epsilon(1e-9));
  CHECK(s(0, 2) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sample_exact: iid empirical covariance within Monte Carlo error") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 5};
  const int n = 100000;
  auto paths = sample_exact(iid_integer(), g, n, {31, 1});
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(emp_cov(paths, i, i) - 1.0) < 4.0 * std::sqrt(2.0) * se);
    for (int j = 0; j < i; ++j) CHECK(std::abs(emp_cov(paths, i, j)) < 4.0 * se);
  }
  double mean = 0.0;
  for (const auto& p : paths) mean += p.values[0];
  CHECK(std::abs(mean / n) < 4.0 * se);
}

TEST_CASE("sample_exact: rank-two measure paths are pure cosines") {
  PathGrid g{Domain::ContinuousTime, 0.0, 0.7, 6};
  auto paths = sample_exact(atom_one(Domain::ContinuousTime), g, 50, {7, 1});
  for (const auto& p : paths) {
    const double t0 = g.t(0), t1 = g.t(1);
    const double det = std::cos(t0) * std::sin(t1) - std::cos(t1) * std::sin(t0);
    const double A = (p.values[0] * std::sin(t1) - p.values[1] * std::sin(t0)) / det;
    const double B = (p.values[1] * std::cos(t0) - p.values[0] * std::cos(t1)) / det;
    for (int i = 0; i < 6; ++i) {
      const double fit = A * std::cos(g.t(i)) + B * std::sin(g.t(i));
      CHECK(std::abs(fit - p.values[i]) < 1e-8);
    }
  }
}

TEST_CASE("sample_exact: n_paths = 0 gives an empty list") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 4};
  CHECK(sample_exact(iid_integer(), g, 0, {1, 1}).empty());
}

TEST_CASE("circulant embedding of white noise is exact with flat spectrum") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 1024};
  CirculantInfo info;
  auto paths = sample_circulant(iid_integer(), g, 4, {5, 1}, &info);
  CHECK_FALSE(info.fell_back_to_exact);
  CHECK(info.embed_size == 2048);
  CHECK(info.min_spectrum == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(paths.size() == 4);
  CHECK(paths[0].method == "circulant");
}

TEST_CASE("circulant matches the gap covariance at small lags") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 16};
  const SpectralMeasure gap = gap_measure(Domain::IntegerTime);
  const int n = 100000;
  auto paths = sample_circulant(gap, g, n, {11, 1});
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  for (int lag = 0; lag <= 4; ++lag) {
    const double want = gap.covariance(lag);
    CHECK(std::abs(emp_cov(paths, 0, lag) - want) < 4.0 * std::sqrt(2.0) * se);
  }
  double mean = 0.0;
  for (const auto& p : paths) mean += p.values[0];
  CHECK(std::abs(mean / n) < 4.0 * se);
}

TEST_CASE("fallback decision matches an independent spectrum computation") {
  // folding cos(min(j, M-j)) is generically not PSD as a circulant
  const SpectralMeasure m = atom_one(Domain::IntegerTime);
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 5};
  CirculantInfo info;
  auto paths = sample_circulant(m, g, 10, {3, 1}, &info);
  std::vector<std::complex<double>> c(info.embed_size);
  for (std::size_t j = 0; j < info.embed_size; ++j)
    c[j] = m.covariance(static_cast<double>(std::min(j, info.embed_size - j)));
  fft_pow2(c);
  double min_spec = c[0].real();
  for (const auto& v : c) min_spec = std::min(min_spec, v.real());
  CHECK(info.min_spectrum == doctest::Approx(min_spec).epsilon(1e-9));
  CHECK(info.fell_back_to_exact == (min_spec < -1e-10));
  CHECK(info.fell_back_to_exact);  // this spectrum does go negative
  CHECK(paths[0].method == "exact-fallback");
  // the fallback still samples the right process
  for (const auto& p : paths) {
    const double A = p.values[0];
    const double B = (p.values[1] - A * std::cos(1.0)) / std::sin(1.0);
    for (int i = 0; i < 5; ++i)
      CHECK(std::abs(A * std::cos(static_cast<double>(i)) +
                     B * std::sin(static_cast<double>(i)) - p.values[i]) < 1e-8);
  }
}

TEST_CASE("exact and circulant agree in distribution (KS on f(0) and the minimum)") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 16};
  const SpectralMeasure gap = gap_measure(Domain::IntegerTime);
  const int n = 10000;
  auto pe = sample_exact(gap, g, n, {101, 1});
  auto pc = sample_circulant(gap, g, n, {202, 1});
  std::vector<double> f0e, f0c, mne, mnc;
  for (const auto& p : pe) {
    f0e.push_back(p.values[0]);
    mne.push_back(*std::min_element(p.values.begin(), p.values.end()));
  }
  for (const auto& p : pc) {
    f0c.push_back(p.values[0]);
    mnc.push_back(*std::min_element(p.values.begin(), p.values.end()));
  }
  // two-sample KS critical value at alpha = 1e-3
  const double crit = 1.9495 * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(ks_two_sample(f0e, f0c) < crit);
  CHECK(ks_two_sample(mne, mnc) < crit);
}

TEST_CASE("spectral sampler: atoms are exact for any n_modes") {
  PathGrid g{Domain::ContinuousTime, 0.0, 0.9, 5};
  SpectralSamplerInfo info;
  auto paths = sample_spectral(atom_one(Domain::ContinuousTime), g, 1, 40, {13, 1}, &info);
  CHECK(info.n_cells == 1);
  for (const auto& p : paths) {
    const double t0 = g.t(0), t1 = g.t(1);
    const double det = std::cos(t0) * std::sin(t1) - std::cos(t1) * std::sin(t0);
    const double A = (p.values[0] * std::sin(t1) - p.values[1] * std::sin(t0)) / det;
    const double B = (p.values[1] * std::cos(t0) - p.values[0] * std::cos(t1)) / det;
    for (int i = 0; i < 5; ++i)
      CHECK(std::abs(A * std::cos(g.t(i)) + B * std::sin(g.t(i)) - p.values[i]) < 1e-8);
  }
}

TEST_CASE("spectral sampler bias shrinks with the partition") {
  PathGrid g{Domain::ContinuousTime, 0.0, 0.7, 2};
  const SpectralMeasure m = sinc_continuous();
  const double truth = m.covariance(0.7);
  const int n = 200000;
  SpectralSamplerInfo info2, info8;
  auto p2 = sample_spectral(m, g, 2, n, {17, 1}, &info2);
  auto p8 = sample_spectral(m, g, 8, n, {18, 1}, &info8);
  const double err2 = std::abs(emp_cov(p2, 0, 1) - truth);
  const double err8 = std::abs(emp_cov(p8, 0, 1) - truth);
  CHECK(err2 > 0.01);  // coarse partition has visible bias
  CHECK(err8 < 0.01);  // refined partition buries it in MC noise
  CHECK(info8.partition_modulus < info2.partition_modulus);
  // documented bias bound: |r_hat - r| <= m0 * modulus * |t|
  CHECK(err2 <= 1.0 * info2.partition_modulus * 0.7 + 4.0 / std::sqrt(n * 1.0));
}

TEST_CASE("single-cell partition reproduces the midpoint covariance") {
  PathGrid g{Domain::ContinuousTime, 0.0, 1.0, 2};
  const int n = 200000;
  auto paths = sample_spectral(sinc_continuous(), g, 1, n, {19, 1});
  // one equal-mass cell of [0,pi]: representative at the mass median pi/2
  const double expect = std::cos(M_PI / 2.0);
  CHECK(std::abs(emp_cov(paths, 0, 1) - expect) < 4.0 / std::sqrt(n * 1.0));
}

TEST_CASE("discrete differences of integer powers") {
  SamplePath p;
  p.grid = {Domain::IntegerTime, 0.0, 1.0, 12};
  p.values.assign(12, 3.25);
  SamplePath d1 = discrete_diff(p, 1);
  CHECK(d1.values.size() == 11);
  for (double v : d1.values) CHECK(v == doctest::Approx(0.0));

  for (int i = 0; i < 12; ++i) p.values[i] = static_cast<double>(i) * i;
  SamplePath d2 = discrete_diff(p, 2);
  for (double v : d2.values) CHECK(v == doctest::Approx(2.0));

  for (int i = 0; i < 12; ++i) p.values[i] = std::pow(static_cast<double>(i), 3);
  SamplePath d3 = discrete_diff(p, 3);
  for (double v : d3.values) CHECK(v == doctest::Approx(6.0));

  CHECK_THROWS_AS((void)discrete_diff(d3, 12), std::invalid_argument);
}

TEST_CASE("derivative measures carry the exact multiplier") {
  SpectralMeasure da = derivative_measure(atom_one(Domain::ContinuousTime));
  CHECK(da.total_mass() == doctest::Approx(1.0));
  SpectralMeasure dpi = derivative_measure(atom_pi());
  CHECK(dpi.total_mass() == doctest::Approx(4.0).epsilon(1e-12));
  SpectralMeasure du = derivative_measure(sinc_continuous());
  CHECK(du.total_mass() == doctest::Approx(M_PI * M_PI / 3.0).epsilon(1e-9));
  // integer-time white noise: the difference process has variance 2
  SpectralMeasure di = derivative_measure(iid_integer());
  CHECK(di.total_mass() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("antiderivative measures and the round trip") {
  CHECK_THROWS_AS((void)antiderivative_measure(sinc_continuous()), std::domain_error);
  const SpectralMeasure gap = gap_measure(Domain::ContinuousTime);
  SpectralMeasure anti = antiderivative_measure(gap);
  CHECK(anti.total_mass() == doctest::Approx(gap.moment(-2.0).value).epsilon(1e-10));
  CHECK(anti.total_mass() == doctest::Approx(0.5).epsilon(1e-10));
  SpectralMeasure round = derivative_measure(anti);
  for (double d : {-2.0, 0.0, 1.0, 2.0}) {
    CHECK(round.moment(d).value == doctest::Approx(gap.moment(d).value).epsilon(1e-10));
  }
  CHECK(round.multipliers.empty());  // the power-law factors cancel exactly

  const SpectralMeasure gap_i = gap_measure(Domain::IntegerTime);
  SpectralMeasure round_i = derivative_measure(antiderivative_measure(gap_i));
  CHECK(round_i.multipliers.empty());
  CHECK(round_i.moment(1.0).value ==
        doctest::Approx(gap_i.moment(1.0).value).epsilon(1e-10));
}

TEST_CASE("k-fold difference variance tracks the derivative measure (MC)") {
  const SpectralMeasure m = gap_measure(Domain::IntegerTime);
  SpectralMeasure d2 = derivative_measure(derivative_measure(m));
  const double want = d2.total_mass();
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 34};
  const int n = 40000;
  auto paths = sample_circulant(m, g, n, {23, 1});
  double acc = 0.0;
  for (const auto& p : paths) {
    SamplePath d = discrete_diff(p, 2);
    acc += d.values[0] * d.values[0];
  }
  const double est = acc / static_cast<double>(n);
  const double se = want * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::abs(est - want) < 4.0 * se);
}

TEST_CASE("determinism: identical RngSpec gives bit-identical paths") {
  PathGrid g{Domain::IntegerTime, 0.0, 1.0, 32};
  const SpectralMeasure m = gap_measure(Domain::IntegerTime);
  auto a = sample_circulant(m, g, 9, {77, 1});
  auto b = sample_circulant(m, g, 9, {77, 1});
  for (int p = 0; p < 9; ++p)
    for (int i = 0; i < 32; ++i) CHECK(a[p].values[i] == b[p].values[i]);
  auto c = sample_exact(m, g, 5, {78, 1});
  auto d = sample_exact(m, g, 5, {78, 1});
  for (int p = 0; p < 5; ++p)
    for (int i = 0; i < 32; ++i) CHECK(c[p].values[i] == d[p].values[i]);
}

TEST_CASE("GSPP binary dump round-trips") {
  PathGrid g{Domain::ContinuousTime, 0.25, 0.5, 7};
  auto paths = sample_exact(sinc_continuous(), g, 3, {9, 1});
  const std::string file = "/tmp/gsp_test_paths.gspp";
  write_paths_gspp(paths, file);
  auto back = read_paths_gspp(file);
  REQUIRE(back.size() == paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    CHECK(back[p].grid.count == 7);
    CHECK(back[p].grid.step == 0.5);
    CHECK(back[p].grid.start == 0.25);
    for (int i = 0; i < 7; ++i) CHECK(back[p].values[i] == paths[p].values[i]);
  }
  std::remove(file.c_str());
}
