#include "gsp/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsp/quadrature.hpp"

namespace gsp {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;

// k+1 uniform spacings of [0,1] (uniform measure on the standard simplex).
void simplex_point(CounterRng& gen, int k, std::vector<double>& u,
                   std::vector<double>& t) {
  u.resize(k);
  for (int i = 0; i < k; ++i) u[i] = gen.uniform();
  std::sort(u.begin(), u.end());
  t.resize(k + 1);
  double prev = 0.0;
  for (int i = 0; i < k; ++i) {
    t[i] = u[i] - prev;
    prev = u[i];
  }
  t[k] = 1.0 - prev;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

NodeSet extrema(int k) {
  if (k < 1) throw std::invalid_argument("extrema: k must be >= 1");
  NodeSet ns;
  ns.k = k;
  ns.kind = NodeKind::ChebyshevExtrema;
  ns.nodes.resize(k + 1);
  for (int j = 0; j <= k; ++j)
    ns.nodes[j] = std::cos((k - j) * kPi / k);
  // pin the exact symmetries lost to rounding
  ns.nodes[0] = -1.0;
  ns.nodes[k] = 1.0;
  for (int j = 0; j <= k / 2; ++j) {
    const double v = 0.5 * (ns.nodes[k - j] - ns.nodes[j]);
    ns.nodes[j] = -v;
    ns.nodes[k - j] = v;
  }
  return ns;
}

double chebyshev_value(int k, double x) {
  if (k < 0) throw std::invalid_argument("chebyshev_value: k must be >= 0");
  if (std::abs(x) > 1.0 + 1e-14)
    throw std::invalid_argument("chebyshev_value: |x| must be <= 1");
  x = std::clamp(x, -1.0, 1.0);
  if (k == 0) return 1.0;
  double tm = 1.0, t = x;
  for (int i = 2; i <= k; ++i) {
    const double tn = 2.0 * x * t - tm;
    tm = t;
    t = tn;
  }
  return t;
}

DividedDiffTable divided_difference(const NodeSet& nodes,
                                    const std::vector<double>& values) {
  const int k = nodes.k;
  if (static_cast<int>(nodes.nodes.size()) != k + 1)
    throw std::invalid_argument("divided_difference: node count mismatch");
  if (values.size() != nodes.nodes.size())
    throw std::invalid_argument("divided_difference: values length must be k+1");
  DividedDiffTable out;
  out.nodes = nodes;
  out.values = values;
  out.table.resize(k + 1);
  out.table[0] = values;
  const auto& x = nodes.nodes;
  for (int j = 1; j <= k; ++j) {
    out.table[j].resize(k + 1 - j);
    for (int i = 0; i + j <= k; ++i) {
      const double dx = x[i + j] - x[i];
      if (dx == 0.0) throw std::invalid_argument("divided_difference: duplicate nodes");
      out.table[j][i] = (out.table[j - 1][i + 1] - out.table[j - 1][i]) / dx;
    }
  }
  out.leading = out.table[k][0];
  return out;
}

MinNormReport min_norm_check(const std::vector<double>& coeffs) {
  if (coeffs.empty() || coeffs.back() == 0.0)
    throw std::invalid_argument("min_norm_check: leading coefficient must be nonzero");
  const int k = static_cast<int>(coeffs.size()) - 1;
  if (k < 1) throw std::invalid_argument("min_norm_check: degree must be >= 1");
  const double lead = coeffs.back();
  NodeSet ns = extrema(k);
  MinNormReport rep;
  rep.threshold = std::ldexp(1.0, 1 - k);
  for (double x : ns.nodes) {
    double v = 0.0;
    for (int i = k; i >= 0; --i) v = v * x + coeffs[i] / lead;  // normalized to monic
    rep.max_abs_at_extrema = std::max(rep.max_abs_at_extrema, std::abs(v));
  }
  rep.pass = rep.max_abs_at_extrema >= rep.threshold - 1e-12;
  return rep;
}

McEstimate hermite_genocchi_mc(const std::function<double(double)>& fk,
                               const NodeSet& nodes, long n_mc, const RngSpec& rng) {
  const int k = nodes.k;
  if (n_mc < 2) throw std::invalid_argument("hermite_genocchi_mc: n_mc must be >= 2");
  const double kfact = factorial(k);
  const int n_batches = 64;
  const long per = (n_mc + n_batches - 1) / n_batches;
  std::vector<double> sums(n_batches, 0.0), sq(n_batches, 0.0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    CounterRng gen(rng.seed, static_cast<std::uint64_t>(b));
    std::vector<double> u, t;
    double s = 0.0, s2 = 0.0;
    for (long i = 0; i < per; ++i) {
      simplex_point(gen, k, u, t);
      double arg = 0.0;
      for (int j = 0; j <= k; ++j) arg += t[j] * nodes.nodes[j];
      const double v = fk(arg);
      s += v;
      s2 += v * v;
    }
    sums[b] = s;
    sq[b] = s2;
  }
  double s = 0.0, s2 = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    s += sums[b];
    s2 += sq[b];
  }
  const double n = static_cast<double>(per * n_batches);
  const double mean = s / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  McEstimate out;
  out.n = static_cast<long>(n);
  out.estimate = mean / kfact;
  out.se = std::sqrt(var / n) / kfact;
  return out;
}

SimplexDensityReport simplex_density_check(int k, const std::vector<double>& s_grid,
                                           long n_mc, const RngSpec& rng) {
  if (k < 1 || k > 8) throw std::invalid_argument("simplex_density_check: k in 1..8");
  NodeSet ns = extrema(k);
  std::vector<double> samples(n_mc);
  const int n_batches = 64;
  const long per = (n_mc + n_batches - 1) / n_batches;
  samples.resize(per * n_batches);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    CounterRng gen(rng.seed, static_cast<std::uint64_t>(b));
    std::vector<double> u, t;
    for (long i = 0; i < per; ++i) {
      simplex_point(gen, k, u, t);
      double arg = 0.0;
      for (int j = 0; j <= k; ++j) arg += t[j] * ns.nodes[j];
      samples[b * per + i] = arg;
    }
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  const double kfact = factorial(k);

  SimplexDensityReport rep;
  rep.s_grid = s_grid;
  rep.bandwidth = 1.06 * std::sqrt(var) * std::pow(n, -0.2);  // Silverman

  auto kde_min = [&](double h, std::vector<double>* out_g, std::vector<double>* out_se) {
    double min_g = std::numeric_limits<double>::infinity();
    for (double s0 : s_grid) {
      double acc = 0.0, acc2 = 0.0;
      for (double v : samples) {
        const double z = (v - s0) / h;
        const double kval = std::exp(-0.5 * z * z) / (h * 2.5066282746310005024);
        acc += kval;
        acc2 += kval * kval;
      }
      const double dens = acc / n;                       // density under uniform P
      const double se_p = std::sqrt(std::max(0.0, acc2 / n - dens * dens) / n);
      const double g = dens / kfact;                     // scale to d-sigma density
      if (out_g) out_g->push_back(g);
      if (out_se) out_se->push_back(se_p / kfact);
      min_g = std::min(min_g, g);
    }
    return min_g;
  };

  rep.min_g = kde_min(rep.bandwidth, &rep.g_hat, &rep.g_se);
  rep.positive_on_grid = rep.min_g > 0.0;
  rep.empirical_L = std::pow(kfact * std::max(rep.min_g, 1e-300), -1.0 / k);
  rep.sensitivity_lo =
      std::pow(kfact * std::max(kde_min(0.5 * rep.bandwidth, nullptr, nullptr), 1e-300),
               -1.0 / k);
  rep.sensitivity_hi =
      std::pow(kfact * std::max(kde_min(1.5 * rep.bandwidth, nullptr, nullptr), 1e-300),
               -1.0 / k);
  return rep;
}

ContinuousCheck verify_continuous(const std::function<double(double)>& f,
                                  const std::function<double(double)>& fk, int k,
                                  double N) {
  if (k < 1) throw std::invalid_argument("verify_continuous: k must be >= 1");
  if (!(N >= k)) throw std::invalid_argument("verify_continuous: needs k <= N");
  ContinuousCheck out;
  // positivity certificate by sampling
  out.min_fk_sampled = std::numeric_limits<double>::infinity();
  double max_fk = 0.0;
  const int n_pos = 1200;
  for (int i = 0; i <= n_pos; ++i) {
    const double x = -N + 2.0 * N * i / n_pos;
    const double v = fk(x);
    out.min_fk_sampled = std::min(out.min_fk_sampled, v);
    max_fk = std::max(max_fk, v);
  }
  if (!(out.min_fk_sampled > 0.0))
    throw std::domain_error("verify_continuous: f^(k) <= 0 detected on [-N,N]");

  const double tol = std::max(1e-12, 1e-11 * max_fk * N);
  QuadResult q = integrate(fk, -0.45 * N, 0.45 * N, tol, 400000);
  out.lhs = q.value / N;

  // sup|f|: dense sampling plus golden refinement around the top candidates
  const int n_sup = 10000;
  std::vector<std::pair<double, double>> best;  // (|f|, x)
  for (int i = 0; i <= n_sup; ++i) {
    const double x = -N + 2.0 * N * i / n_sup;
    best.emplace_back(std::abs(f(x)), x);
  }
  std::partial_sort(best.begin(), best.begin() + 10, best.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double sup = 0.0;
  const double gr = 0.61803398874989484820458683436564;
  const double h = 2.0 * N / n_sup;
  for (int c = 0; c < 10; ++c) {
    double a = std::max(-N, best[c].second - h);
    double b = std::min(N, best[c].second + h);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
    for (int it = 0; it < 80 && (b - a) > 1e-12 * N; ++it) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = std::abs(f(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = std::abs(f(x2));
      }
    }
    sup = std::max({sup, f1, f2, best[c].first});
  }
  out.sup = sup;
  out.implied_c0 = (N / k) * std::pow(out.lhs / out.sup, 1.0 / k);
  return out;
}

double bspline_value(int k, double x) {
  if (k < 0 || k > 20) throw std::invalid_argument("bspline_value: order in 0..20");
  // shift to the uncentered spline M_k with support [0, k+1); the half-open
  // convention keeps the k = 0 partition of unity exact at cell boundaries
  double t = x + 0.5 * (k + 1);
  if (t < 0.0 || t >= k + 1) return 0.0;
  // Cox-de Boor on the uniform knots 0..k+1
  std::vector<double> v(k + 1, 0.0);
  const int cell = static_cast<int>(std::floor(t));
  if (cell < 0 || cell > k) return 0.0;
  v[cell] = 1.0;  // degree-0 splines: indicator of [cell, cell+1)
  for (int d = 1; d <= k; ++d) {
    for (int i = 0; i + d <= k; ++i) {
      // spline of degree d supported on [i, i+d+1]
      const double left = (t - i) / d * v[i];
      const double right = (i + d + 1 - t) / d * v[i + 1];
      v[i] = left + right;
    }
    // the last entry v[k-d+1..] is stale; harmless, never read again
  }
  return v[0];
}

DiscreteCheck verify_discrete(const std::vector<double>& f_values, int k, int N) {
  if (k < 1 || N < k) throw std::invalid_argument("verify_discrete: needs 1 <= k <= N");
  const int L = 2 * N;  // values on [-2N, 2N], index i <-> n = i - 2N
  if (static_cast<int>(f_values.size()) != 2 * L + 1)
    throw std::invalid_argument("verify_discrete: expected 4N+1 values on [-2N,2N]");
  auto f_at = [&](int n) { return f_values[n + L]; };
  auto diff_k = [&](int n) {
    // Delta^k f(n) via binomial alternating sum; needs n..n+k inside the window
    double s = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      s += sign * binom * f_at(n + j);
      binom = binom * (k - j) / (j + 1.0);
    }
    return s;
  };

  DiscreteCheck out;
  for (int n = -N; n <= N; ++n) {
    if (n + k > L) break;
    if (!(diff_k(n) > 0.0))
      throw std::domain_error("verify_discrete: Delta^k f <= 0 on [-N,N]");
  }
  const int w = static_cast<int>(std::floor(0.9 * N));
  double s = 0.0;
  for (int n = -w; n <= w; ++n) s += diff_k(n);
  out.lhs = s / N;
  out.hypothesis_scaling =
      out.lhs >= factorial(k) / std::pow(static_cast<double>(N), k) * (1.0 - 1e-12);
  double sup = 0.0;
  for (int n = -L; n <= L; ++n) sup = std::max(sup, std::abs(f_at(n)));
  out.sup = sup;
  out.implied_c =
      std::pow(out.lhs * std::pow(static_cast<double>(N), k) / (factorial(k) * sup),
               1.0 / k);

  // smoothing F(x) = sum f(n) B_{k+1}(x - n); its k-th derivative is
  // sum Delta^k f(n) B_1(x - n - k/2), positive on the shifted safe window.
  auto smoothed_fk = [&](double x) {
    double acc = 0.0;
    const int lo = static_cast<int>(std::ceil(x - k / 2.0 - 1.0));
    const int hi = static_cast<int>(std::floor(x - k / 2.0 + 1.0));
    for (int n = std::max(lo, -L); n <= std::min(hi, L - k); ++n)
      acc += diff_k(n) * bspline_value(1, x - n - k / 2.0);
    return acc;
  };
  out.min_smoothed_fk = std::numeric_limits<double>::infinity();
  const double xa = -N + 1 + k / 2.0, xb = N - 1 + k / 2.0;
  const int n_pos = 1000;
  for (int i = 0; i <= n_pos; ++i) {
    const double x = xa + (xb - xa) * i / n_pos;
    out.min_smoothed_fk = std::min(out.min_smoothed_fk, smoothed_fk(x));
  }
  out.smoothing_positive = out.min_smoothed_fk > 0.0;
  return out;
}

}  // namespace gsp
