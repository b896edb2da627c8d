#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gsp/rng.hpp"
#include "gsp/sampler.hpp"
#include "gsp/spectral_measure.hpp"

namespace gsp {

struct CheckReport {
  std::string name;
  std::string detail;      // grid / sample description
  double margin = 0.0;     // worst-case signed slack (>= 0 means satisfied)
  double se = 0.0;         // 0 for deterministic checks
  bool pass = false;       // margin >= -3 se (stochastic) or >= -1e-12 (deterministic)
  long n_samples = 0;
};

// Lemma-level one-dimensional tail/ball sandwich bounds on a positive grid.
CheckReport tail_bounds_check(const std::vector<double>& x_grid);

// Smallest theta (bisection to 1e-6) with P(Z <= x) <= P(|Z| <= theta x) on a
// log-dense grid of x in [delta, 50].
double tails_comp_theta(double delta);
bool tails_comp_verify(double delta, double theta, int grid_mult = 10);

// Ball probability dominates the product of coordinate balls (dim <= 8).
CheckReport khatri_sidak_check(const Eigen::MatrixXd& sigma, double ell, long n_samples,
                               const RngSpec& rng);

// P(sup |X+Y| <= ell) <= P(sup |X| <= ell) for independent X, Y on a small grid.
CheckReport anderson_check(const SpectralMeasure& rho_x, const SpectralMeasure& rho_y,
                           const PathGrid& grid, double ell, long n_samples,
                           const RngSpec& rng);

// Gaussian concentration of the supremum around its mean on a grid restriction.
CheckReport borell_tis_check(const SpectralMeasure& rho, double N,
                             const std::vector<double>& u_grid, long n_samples,
                             const RngSpec& rng);

struct DudleyReport {
  double empirical_e_sup = 0.0;
  double se = 0.0;
  double bound_shape = 0.0;  // sqrt(m0 max(log(aN),1)) resp. sqrt(b m0) N^{1-g/2}
  double implied_K = 0.0;
  double grid_step = 0.0;
};

DudleyReport dudley_sup_stationary(const SpectralMeasure& rho, double N, long n_samples,
                                   const RngSpec& rng);

DudleyReport dudley_sup_antiderivative(const SpectralMeasure& rho, double b, double gamma,
                                       double N, long n_samples, const RngSpec& rng);

struct AntiderivVariance {
  double value = 0.0;       // N^2 integral of sinc^2(N lambda / 2) d rho
  double quad_error = 0.0;
  bool bound_checked = false;
  double bound = 0.0;       // (16 b / (2-gamma)) m0 N^(2-gamma) when (b,gamma) given
  bool bound_ok = false;
};

AntiderivVariance antideriv_variance(const SpectralMeasure& rho, double N,
                                     double b = -1.0, double gamma = -1.0);

// Product bound for shifted iid coordinates (deterministic, log space).
CheckReport iid_average_bound_check(const std::vector<double>& b_vector, double q);

// Cyclic-shift averaging witness: some shift tau keeps the S-average below L.
int cyclic_shift_witness(const std::vector<double>& f_values,
                         const std::vector<int>& S, double L);

struct LargeBallReport {
  std::vector<double> ell_grid;
  std::vector<double> lhs;     // MC of P(|f| <= ell on the fine grid of [0,N])
  std::vector<double> lhs_se;
  std::vector<double> rhs;     // P(c |f(0)| <= ell)^N
  double smallest_passing_ell = 0.0;  // 0 if none
  bool any_pass = false;
};

LargeBallReport large_ball_check(const SpectralMeasure& rho, double c,
                                 const std::vector<double>& ell_grid, double N,
                                 long n_samples, const RngSpec& rng);

}  // namespace gsp
