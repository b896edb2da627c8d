#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gsp/rng.hpp"

namespace gsp {

enum class NodeKind { ChebyshevExtrema, Custom };

struct NodeSet {
  int k = 1;
  std::vector<double> nodes;  // k+1 strictly increasing points in [-1,1]
  NodeKind kind = NodeKind::Custom;
};

// x_j = cos((k-j) pi / k), j = 0..k; T_k alternates (-1)^(k-j) on them.
NodeSet extrema(int k);

// T_k(x) by the three-term recurrence; |x| <= 1.
double chebyshev_value(int k, double x);

struct DividedDiffTable {
  NodeSet nodes;
  std::vector<double> values;
  std::vector<std::vector<double>> table;  // table[j][i] = f[x_i..x_{i+j}]
  double leading = 0.0;
};

DividedDiffTable divided_difference(const NodeSet& nodes,
                                    const std::vector<double>& values);

struct MinNormReport {
  double max_abs_at_extrema = 0.0;
  double threshold = 0.0;  // 2^(1-k)
  bool pass = false;
};

// Monic degree-k polynomials satisfy max_j |P(x_j)| >= 2^(1-k) at the extrema.
// coeffs are ascending (c0 + c1 x + ... + ck x^k); normalized to monic if needed.
MinNormReport min_norm_check(const std::vector<double>& coeffs);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
  long n = 0;
};

// Uniform-simplex Monte Carlo for the Hermite-Genocchi integral
// f[x_0..x_k] = (1/k!) E[ f^(k)(sum t_j x_j) ], t uniform on the simplex.
McEstimate hermite_genocchi_mc(const std::function<double(double)>& fk,
                               const NodeSet& nodes, long n_mc, const RngSpec& rng);

struct SimplexDensityReport {
  std::vector<double> s_grid;
  std::vector<double> g_hat;        // KDE estimate of g_k (density under d-sigma)
  std::vector<double> g_se;
  double min_g = 0.0;
  double empirical_L = 0.0;         // (k! min g)^(-1/k)
  double bandwidth = 0.0;
  double sensitivity_lo = 0.0;      // empirical_L at 0.5x and 1.5x bandwidth
  double sensitivity_hi = 0.0;
  bool positive_on_grid = false;
};

SimplexDensityReport simplex_density_check(int k, const std::vector<double>& s_grid,
                                           long n_mc, const RngSpec& rng);

struct ContinuousCheck {
  double lhs = 0.0;         // (1/N) integral of f^(k) over [-9N/20, 9N/20]
  double sup = 0.0;         // sup |f| over [-N,N]
  double implied_c0 = 0.0;  // (N/k) (lhs/sup)^(1/k)
  double min_fk_sampled = 0.0;
  bool holds(double c0) const { return implied_c0 <= c0; }
};

ContinuousCheck verify_continuous(const std::function<double(double)>& f,
                                  const std::function<double(double)>& fk, int k,
                                  double N);

// Centered cardinal B-spline of order k (degree k, support [-(k+1)/2, (k+1)/2]).
double bspline_value(int k, double x);

struct DiscreteCheck {
  double lhs = 0.0;        // (1/N) sum over I_N of Delta^k f
  double sup = 0.0;        // max |f| over [-2N, 2N]
  double implied_c = 0.0;  // (lhs N^k / (k! sup))^(1/k)
  bool hypothesis_scaling = false;  // lhs >= k!/N^k branch
  bool smoothing_positive = false;  // F^(k) > 0 confirmed by sampling
  double min_smoothed_fk = 0.0;
};

// f_values holds f on [-2N, 2N] (index i <-> n = i - 2N).
DiscreteCheck verify_discrete(const std::vector<double>& f_values, int k, int N);

}  // namespace gsp
