#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gsp/rng.hpp"

namespace gsp {

// P(X > 0 componentwise) for X ~ N(0, Sigma). Closed forms for dim <= 3;
// dims 4..7 via Plackett path integration with nested adaptive quadrature,
// absolute error <= abs_tol.
double exact_orthant_small(const Eigen::MatrixXd& sigma, double abs_tol = 1e-8);

struct MvnEstimate {
  double log_p = 0.0;
  double se_log = 0.0;
  long n_samples = 0;
  int n_batches = 0;
  double ess = 0.0;             // effective sample size of the importance weights
  bool low_confidence = false;  // se_log > 1 or ess too small
};

// Sequential-conditioning Monte Carlo for P(lower < X < upper), X ~ N(0, Sigma),
// with greedy variable reordering; log-space end to end. Batch boundaries are
// fixed by n_samples alone, so results are identical for any worker count.
MvnEstimate mvn_box_mc(const Eigen::MatrixXd& sigma, const std::vector<double>& lower,
                       const std::vector<double>& upper, long n_samples,
                       const RngSpec& rng, bool parallel = true, int n_batches = 64);

// Serial reference implementation (same kernel, plain loop); kept for testing
// and benchmarked against the parallel version.
MvnEstimate mvn_box_mc_serial(const Eigen::MatrixXd& sigma,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper, long n_samples,
                              const RngSpec& rng, int n_batches = 64);

MvnEstimate genz_orthant(const Eigen::MatrixXd& sigma, long n_samples,
                         const RngSpec& rng, bool parallel = true);

}  // namespace gsp
