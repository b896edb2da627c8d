#include "gsp/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gsp/sampler.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* method_name(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::ExactSmall: return "exact";
    case EstimateMethod::OrthantMC: return "orthant";
    case EstimateMethod::PathMC: return "path";
  }
  return "?";
}

PersistenceEstimate exact_estimate(const Eigen::MatrixXd& sigma, double grid_step) {
  constexpr double tol = 1e-8;
  const double p = exact_orthant_small(sigma, tol);
  PersistenceEstimate est;
  est.method = EstimateMethod::ExactSmall;
  est.grid_step = grid_step;
  est.n_samples = 0;
  est.log_p = (p > 0.0) ? std::log(p) : -kInf;
  est.se_log = (p > 0.0) ? tol / p : kInf;
  return est;
}

PersistenceEstimate orthant_estimate(const Eigen::MatrixXd& sigma, long n_samples,
                                     const RngSpec& rng, double grid_step,
                                     bool parallel) {
  MvnEstimate mc = genz_orthant(sigma, n_samples, rng, parallel);
  PersistenceEstimate est;
  est.method = EstimateMethod::OrthantMC;
  est.grid_step = grid_step;
  est.n_samples = mc.n_samples;
  est.log_p = std::min(mc.log_p, 0.0);
  est.se_log = mc.se_log;
  est.low_confidence = mc.low_confidence;
  return est;
}

// Naive path Monte Carlo: stream paths, count all-positive hits per fixed batch.
PersistenceEstimate path_estimate(const SpectralMeasure& rho, const PathGrid& grid,
                                  long n_samples, const RngSpec& rng, bool parallel) {
  PathSampler sampler(rho, grid, /*prefer_circulant=*/true);
  const int n_batches = 64;
  const long per_pairs = (n_samples / 2 + n_batches - 1) / n_batches;
  std::vector<long> hits(n_batches, 0);
  std::vector<long> counts(n_batches, 0);

  auto kernel = [&](int b) {
    std::vector<double> even, odd;
    long h = 0, c = 0;
    for (long s = 0; s < per_pairs; ++s) {
      const std::uint64_t pair = static_cast<std::uint64_t>(b) * per_pairs + s;
      sampler.generate_pair(rng.seed, pair, even, odd);
      for (const auto* v : {&even, &odd}) {
        bool pos = true;
        for (double x : *v) {
          if (!(x > 0.0)) {  // exact zeros count as failures
            pos = false;
            break;
          }
        }
        h += pos ? 1 : 0;
        ++c;
      }
    }
    hits[b] = h;
    counts[b] = c;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n_batches; ++b) kernel(b);
  } else {
    for (int b = 0; b < n_batches; ++b) kernel(b);
  }
  long total_hits = 0, total = 0;
  for (int b = 0; b < n_batches; ++b) {
    total_hits += hits[b];
    total += counts[b];
  }
  PersistenceEstimate est;
  est.method = EstimateMethod::PathMC;
  est.grid_step = (grid.domain == Domain::IntegerTime) ? 0.0 : grid.step;
  est.n_samples = total;
  if (total_hits == 0) {
    est.log_p = -kInf;
    est.se_log = kInf;
    est.low_confidence = true;
    return est;
  }
  const double p = static_cast<double>(total_hits) / static_cast<double>(total);
  est.log_p = std::log(p);
  est.se_log = std::sqrt((1.0 - p) / static_cast<double>(total_hits));
  est.low_confidence = !(est.se_log <= 1.0);
  return est;
}

PersistenceEstimate estimate_on_grid(const SpectralMeasure& rho, const PathGrid& grid,
                                     long n_samples, const RngSpec& rng,
                                     const PersistenceOptions& opts) {
  const double step_tag = (grid.domain == Domain::IntegerTime) ? 0.0 : grid.step;
  if (opts.method == EstimateMethod::PathMC)
    return path_estimate(rho, grid, n_samples, rng, opts.parallel);
  if (opts.method == EstimateMethod::ExactSmall) {
    if (grid.count > opts.exact_small_max)
      throw std::invalid_argument("exact orthant limited to dimension 7");
    return exact_estimate(cov_matrix(rho, grid), step_tag);
  }
  if (grid.count > opts.orthant_dim_cap)
    throw std::invalid_argument("orthant MC dimension exceeds the configured cap");
  return orthant_estimate(cov_matrix(rho, grid), n_samples, rng, step_tag, opts.parallel);
}

}  // namespace

PersistenceEstimate persistence_integer(const SpectralMeasure& rho, int N,
                                        long n_samples, const RngSpec& rng,
                                        const PersistenceOptions& opts) {
  if (rho.domain != Domain::IntegerTime)
    throw std::invalid_argument("persistence_integer: integer-time measure required");
  if (N < 1) throw std::invalid_argument("persistence_integer: N must be >= 1");
  PathGrid grid;
  grid.domain = Domain::IntegerTime;
  grid.start = 1.0;
  grid.step = 1.0;
  grid.count = N;
  PersistenceOptions o = opts;
  if (o.method == EstimateMethod::OrthantMC && N <= o.exact_small_max)
    o.method = EstimateMethod::ExactSmall;
  return estimate_on_grid(rho, grid, n_samples, rng, o);
}

PersistenceEstimate persistence_continuous(const SpectralMeasure& rho, double N,
                                           double h, long n_samples, const RngSpec& rng,
                                           const PersistenceOptions& opts) {
  if (rho.domain != Domain::ContinuousTime)
    throw std::invalid_argument("persistence_continuous: continuous-time measure required");
  if (!(N > 0.0) || !(h > 0.0))
    throw std::invalid_argument("persistence_continuous: N and h must be > 0");
  const int count = std::max(1, static_cast<int>(std::floor(N / h + 1e-9)));
  PathGrid grid;
  grid.domain = Domain::ContinuousTime;
  grid.start = h;
  grid.step = h;
  grid.count = count;
  PersistenceOptions o = opts;
  if (o.method == EstimateMethod::OrthantMC && count <= o.exact_small_max)
    o.method = EstimateMethod::ExactSmall;
  return estimate_on_grid(rho, grid, n_samples, rng, o);
}

std::vector<CurvePoint> persistence_curve(const SpectralMeasure& rho,
                                          const std::vector<double>& N_list,
                                          long n_samples, const RngSpec& rng,
                                          const PersistenceOptions& opts, double h) {
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (!(N_list[i] > N_list[i - 1]))
      throw std::invalid_argument("persistence_curve: N_list must be strictly increasing");
  std::vector<CurvePoint> out;
  out.reserve(N_list.size());
  for (double N : N_list) {
    CurvePoint pt;
    pt.N = N;
    try {
      if (rho.domain == Domain::IntegerTime)
        pt.estimate = persistence_integer(rho, static_cast<int>(std::llround(N)),
                                          n_samples, rng, opts);
      else
        pt.estimate = persistence_continuous(rho, N, h, n_samples, rng, opts);
    } catch (const std::exception& e) {
      pt.failed = true;
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

RefinementStudy grid_refinement_study(const SpectralMeasure& rho, double N,
                                      const std::vector<double>& h_list, long n_samples,
                                      const RngSpec& rng, const PersistenceOptions& opts) {
  if (h_list.empty()) throw std::invalid_argument("grid_refinement_study: empty h list");
  RefinementStudy study;
  std::vector<double> hs = h_list;
  std::sort(hs.begin(), hs.end(), std::greater<double>());  // coarse to fine
  for (double h : hs) {
    RefinementRow row;
    row.h = h;
    row.estimate = persistence_continuous(rho, N, h, n_samples, rng, opts);
    study.rows.push_back(row);
  }
  if (study.rows.size() >= 2) {
    const auto& fine = study.rows[study.rows.size() - 1];
    const auto& prev = study.rows[study.rows.size() - 2];
    if (std::isfinite(fine.estimate.log_p) && std::isfinite(prev.estimate.log_p)) {
      study.slope = (prev.estimate.log_p - fine.estimate.log_p) / (prev.h - fine.h);
      study.log_p_extrapolated = fine.estimate.log_p - study.slope * fine.h;
      study.extrapolated = true;
    }
  }
  return study;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve, EstimateMethod method,
                         std::uint64_t seed) {
  std::ostringstream out;
  out << "N,log_p,se_log,method,grid_step,n_samples,seed\n";
  char buf[256];
  for (const auto& pt : curve) {
    if (pt.failed) {
      std::snprintf(buf, sizeof(buf), "%.17g,,,%s,,,%llu\n", pt.N, method_name(method),
                    static_cast<unsigned long long>(seed));
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s,%.17g,%ld,%llu\n", pt.N,
                    pt.estimate.log_p, pt.estimate.se_log, method_name(method),
                    pt.estimate.grid_step, pt.estimate.n_samples,
                    static_cast<unsigned long long>(seed));
    }
    out << buf;
  }
  return out.str();
}

}  // namespace gsp
