// Throughput comparison of the OpenMP Monte Carlo kernels against their serial
// reference implementations, plus a bit-identity spot check.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "gsp/orthant.hpp"
#include "gsp/persistence.hpp"
#include "gsp/sampler.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

gsp::SpectralMeasure iid_measure() {
  gsp::SpectralMeasure m;
  m.domain = gsp::Domain::IntegerTime;
  m.segments.push_back({0.0, M_PI, gsp::SegmentForm::Constant, 1.0 / (2.0 * M_PI), 0.0, 1.0});
  m.declared_delta = 2.0;
  return m;
}

}  // namespace

int main() {
  const gsp::SpectralMeasure m = iid_measure();
  const gsp::RngSpec rng{42, 1};
  std::printf("threads available: %d\n", omp_get_max_threads());

  {
    const Eigen::MatrixXd sigma = gsp::cov_matrix(
        m, gsp::PathGrid{gsp::Domain::IntegerTime, 1.0, 1.0, 64});
    const long n = 200000;
    auto t0 = std::chrono::steady_clock::now();
    gsp::MvnEstimate serial = gsp::mvn_box_mc_serial(
        sigma, std::vector<double>(64, 0.0),
        std::vector<double>(64, std::numeric_limits<double>::infinity()), n, rng);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    gsp::MvnEstimate parallel = gsp::genz_orthant(sigma, n, rng, true);
    const double tp = seconds_since(t0);
    std::printf("orthant MC dim=64 n=%ld: serial %.3fs, openmp %.3fs (x%.2f), identical=%s\n",
                n, ts, tp, ts / tp,
                (serial.log_p == parallel.log_p && serial.se_log == parallel.se_log)
                    ? "yes"
                    : "NO");
  }

  {
    gsp::PathGrid grid{gsp::Domain::IntegerTime, 0.0, 1.0, 256};
    gsp::PathSampler sampler(m, grid, true);
    const long n_pairs = 20000;
    std::vector<double> a, b;
    auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (long i = 0; i < n_pairs; ++i) {
      sampler.generate_pair(rng.seed, i, a, b);
      sink += a[0] + b[0];
    }
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    std::vector<double> firsts(n_pairs);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n_pairs; ++i) {
      std::vector<double> x, y;
      sampler.generate_pair(rng.seed, i, x, y);
      firsts[i] = x[0] + y[0];
    }
    const double tp = seconds_since(t0);
    double sink_p = 0.0;
    for (double v : firsts) sink_p += v;
    std::printf("circulant sampling dim=256 pairs=%ld: serial %.3fs, openmp %.3fs (x%.2f), identical=%s\n",
                n_pairs, ts, tp, ts / tp, (sink == sink_p) ? "yes" : "NO");
  }
  return 0;
}
