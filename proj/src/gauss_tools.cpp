#include "gsp/gauss_tools.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gsp/orthant.hpp"
#include "gsp/quadrature.hpp"
#include "gsp/special.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-path statistics with fixed batch boundaries (worker-count independent).
template <typename StatFn>
std::vector<double> path_stats(const PathSampler& sampler, long n_paths,
                               std::uint64_t seed, std::uint64_t stream_offset,
                               StatFn&& stat) {
  const int n_batches = 64;
  const long pairs = (n_paths + 1) / 2;
  const long per = (pairs + n_batches - 1) / n_batches;
  std::vector<double> out(2 * per * n_batches);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    std::vector<double> even, odd;
    for (long s = 0; s < per; ++s) {
      const std::uint64_t pair = static_cast<std::uint64_t>(b) * per + s;
      sampler.generate_pair(seed, stream_offset + pair, even, odd);
      out[2 * (b * per + s)] = stat(even);
      out[2 * (b * per + s) + 1] = stat(odd);
    }
  }
  out.resize(n_paths);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

CheckReport tail_bounds_check(const std::vector<double>& x_grid) {
  CheckReport rep;
  rep.name = "tail_bounds";
  rep.detail = std::to_string(x_grid.size()) + "-point grid";
  double worst = kInf;
  const double inv_sqrt2pi = 0.39894228040143267793994605993438;
  auto update = [&](double lhs, double rhs) {
    // relative slack of lhs <= rhs
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::min(worst, (rhs - lhs) / scale);
  };
  for (double x : x_grid) {
    if (!(x > 0.0)) continue;
    const double ccdf = normal_ccdf(x);
    const double ball = normal_ball(x);
    const double e = std::exp(-0.5 * x * x);
    update(inv_sqrt2pi * (1.0 / x - 1.0 / (x * x * x)) * e, ccdf);
    update(ccdf, inv_sqrt2pi * e / x);
    if (x >= 2.0) {
      update(std::exp(-x * x), ccdf);
      update(ccdf, e);
    }
    update(std::sqrt(2.0 / M_PI) * x * e, ball);
    update(ball, x);
    if (x <= 1.0) update(0.25 * x, ball);
  }
  rep.margin = worst;
  rep.pass = rep.margin >= -1e-12;
  return rep;
}

namespace {

bool theta_holds(double delta, double theta, int grid_points) {
  const double lo = std::log(delta), hi = std::log(50.0);
  for (int i = 0; i <= grid_points; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / grid_points);
    if (log_normal_ccdf(theta * x) > log_normal_ccdf(x) - M_LN2 + 1e-14) return false;
  }
  return true;
}

}  // namespace

double tails_comp_theta(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("tails_comp_theta: delta must be > 0");
  double lo = 1.0, hi = 2.0;
  while (!theta_holds(delta, hi, 2000)) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("tails_comp_theta: no theta found");
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (theta_holds(delta, mid, 2000)) hi = mid;
    else lo = mid;
  }
  return hi;
}

bool tails_comp_verify(double delta, double theta, int grid_mult) {
  return theta_holds(delta, theta, 2000 * grid_mult);
}

namespace {

// exact box probabilities P(|X_j| <= l_j) for standardized correlation matrices
double box2_exact(double rho, double l1, double l2) {
  const double s = std::sqrt(std::max(1e-14, 1.0 - rho * rho));
  auto f = [&](double x) {
    return normal_pdf(x) *
           (normal_cdf((l2 - rho * x) / s) - normal_cdf((-l2 - rho * x) / s));
  };
  return integrate(f, -l1, l1, 1e-11).value;
}

double box3_exact(const Eigen::MatrixXd& r, double l1, double l2, double l3) {
  const double r12 = r(0, 1), r13 = r(0, 2), r23 = r(1, 2);
  const double v2 = std::max(1e-14, 1.0 - r12 * r12);
  const double b1 = (r13 - r23 * r12) / v2;
  const double b2 = (r23 - r13 * r12) / v2;
  const double v3 = std::max(1e-14, 1.0 - b1 * r13 - b2 * r23);
  const double s2 = std::sqrt(v2), s3 = std::sqrt(v3);
  auto inner = [&](double x) {
    auto g = [&](double y) {
      const double mu = b1 * x + b2 * y;
      return normal_pdf((y - r12 * x) / s2) / s2 *
             (normal_cdf((l3 - mu) / s3) - normal_cdf((-l3 - mu) / s3));
    };
    return integrate(g, -l2, l2, 1e-11).value;
  };
  auto f = [&](double x) { return normal_pdf(x) * inner(x); };
  return integrate(f, -l1, l1, 1e-9).value;
}

}  // namespace

CheckReport khatri_sidak_check(const Eigen::MatrixXd& sigma, double ell, long n_samples,
                               const RngSpec& rng) {
  const int n = static_cast<int>(sigma.rows());
  if (n < 1 || n > 8) throw std::invalid_argument("khatri_sidak_check: dim must be 1..8");
  if (!(ell > 0.0)) throw std::invalid_argument("khatri_sidak_check: ell must be > 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, sigma.diagonal().maxCoeff()))
    throw std::domain_error("khatri_sidak_check: covariance not PSD");

  CheckReport rep;
  rep.name = "khatri_sidak";
  double rhs = 1.0;
  std::vector<double> l(n);
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    const double sd = std::sqrt(sigma(i, i));
    l[i] = ell / sd;
    rhs *= normal_ball(l[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r(i, j) = sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));

  double lhs, se = 0.0;
  if (n == 1) {
    lhs = normal_ball(l[0]);
    rep.detail = "exact (dim 1)";
  } else if (n == 2) {
    lhs = box2_exact(r(0, 1), l[0], l[1]);
    rep.detail = "exact quadrature (dim 2)";
  } else if (n == 3) {
    lhs = box3_exact(r, l[0], l[1], l[2]);
    rep.detail = "exact quadrature (dim 3)";
  } else {
    std::vector<double> lower(n), upper(n);
    for (int i = 0; i < n; ++i) {
      lower[i] = -ell;
      upper[i] = ell;
    }
    MvnEstimate mc = mvn_box_mc(sigma, lower, upper, n_samples, rng);
    lhs = std::exp(mc.log_p);
    se = lhs * mc.se_log;
    rep.detail = "sequential-conditioning MC";
    rep.n_samples = mc.n_samples;
  }
  rep.margin = lhs - rhs;
  rep.se = se;
  rep.pass = (se > 0.0) ? (rep.margin >= -3.0 * se) : (rep.margin >= -1e-9);
  return rep;
}

CheckReport anderson_check(const SpectralMeasure& rho_x, const SpectralMeasure& rho_y,
                           const PathGrid& grid, double ell, long n_samples,
                           const RngSpec& rng) {
  if (grid.count > 64) throw std::invalid_argument("anderson_check: grid limited to 64 points");
  PathSampler sx(rho_x, grid, false);
  PathSampler sy(rho_y, grid, false);
  long both = 0, only_x = 0;
  const int n_batches = 64;
  const long per = (n_samples + n_batches - 1) / n_batches;
  std::vector<long> cb(n_batches, 0), cx(n_batches, 0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    std::vector<double> x, y;
    long nb = 0, nx = 0;
    for (long s = 0; s < per; ++s) {
      const std::uint64_t idx = static_cast<std::uint64_t>(b) * per + s;
      sx.generate(rng.seed, idx, x);
      sy.generate(rng.seed, idx + (1ull << 62), y);
      double mx = 0.0, mxy = 0.0;
      for (int i = 0; i < grid.count; ++i) {
        mx = std::max(mx, std::abs(x[i]));
        mxy = std::max(mxy, std::abs(x[i] + y[i]));
      }
      nx += (mx <= ell) ? 1 : 0;
      nb += (mxy <= ell) ? 1 : 0;
    }
    cb[b] = nb;
    cx[b] = nx;
  }
  for (int b = 0; b < n_batches; ++b) {
    both += cb[b];
    only_x += cx[b];
  }
  const double total = static_cast<double>(per * n_batches);
  const double p_both = both / total;
  const double p_x = only_x / total;
  CheckReport rep;
  rep.name = "anderson";
  rep.detail = std::to_string(grid.count) + "-point grid, shared X samples";
  rep.n_samples = static_cast<long>(total);
  rep.margin = p_x - p_both;
  rep.se = std::sqrt((p_both * (1 - p_both) + p_x * (1 - p_x)) / total);
  rep.pass = rep.margin >= -3.0 * rep.se;
  return rep;
}

CheckReport borell_tis_check(const SpectralMeasure& rho, double N,
                             const std::vector<double>& u_grid, long n_samples,
                             const RngSpec& rng) {
  PathGrid grid;
  grid.domain = rho.domain;
  if (rho.domain == Domain::IntegerTime) {
    grid.start = 0.0;
    grid.step = 1.0;
    grid.count = static_cast<int>(N) + 1;
  } else {
    grid.count = 256;
    grid.start = 0.0;
    grid.step = N / 255.0;
  }
  if (grid.count > 256) throw std::invalid_argument("borell_tis_check: dim limited to 256");
  PathSampler sampler(rho, grid, true);
  std::vector<double> sups = path_stats(sampler, n_samples, rng.seed, 0,
                                        [](const std::vector<double>& v) {
                                          double m = -kInf;
                                          for (double x : v) m = std::max(m, x);
                                          return m;
                                        });
  const double e_sup = mean_of(sups);
  const double se_sup = sd_of(sups, e_sup) / std::sqrt(static_cast<double>(sups.size()));
  const double sigma_i = rho.covariance(0.0);  // max of the (constant) diagonal
  CheckReport rep;
  rep.name = "borell_tis";
  rep.detail = std::to_string(grid.count) + "-point grid restriction";
  rep.n_samples = static_cast<long>(sups.size());
  double worst = kInf, worst_se = 0.0;
  for (double u : u_grid) {
    if (!(u > 0.0)) continue;
    long cnt = 0;
    for (double s : sups) cnt += (s - e_sup > u) ? 1 : 0;
    const double freq = static_cast<double>(cnt) / static_cast<double>(sups.size());
    const double bound = std::exp(-u * u / (2.0 * sigma_i));
    const double se_freq =
        std::sqrt(std::max(freq * (1 - freq), 1.0 / static_cast<double>(sups.size())) /
                  static_cast<double>(sups.size()));
    const double se_u = se_freq + bound * (u / sigma_i) * se_sup;
    if (bound - freq < worst) {
      worst = bound - freq;
      worst_se = se_u;
    }
  }
  rep.margin = worst;
  rep.se = worst_se;
  rep.pass = rep.margin >= -3.0 * rep.se;
  return rep;
}

DudleyReport dudley_sup_stationary(const SpectralMeasure& rho, double N, long n_samples,
                                   const RngSpec& rng) {
  MomentEntry m2 = rho.moment(2.0);
  if (m2.infinite) throw std::domain_error("dudley_sup_stationary inapplicable: m_2 = inf");
  const double m0 = rho.total_mass();
  DudleyReport rep;
  rep.grid_step = std::min(1.0, 1.0 / std::sqrt(std::max(m2.value, 1e-12))) / 4.0;
  PathGrid grid;
  grid.domain = rho.domain;
  if (rho.domain == Domain::IntegerTime) {
    grid.step = 1.0;
    grid.count = static_cast<int>(N) + 1;
    rep.grid_step = 1.0;
  } else {
    grid.step = rep.grid_step;
    grid.count = static_cast<int>(std::floor(N / rep.grid_step)) + 1;
  }
  grid.start = 0.0;
  PathSampler sampler(rho, grid, true);
  std::vector<double> sups = path_stats(sampler, n_samples, rng.seed, 0,
                                        [](const std::vector<double>& v) {
                                          double m = -kInf;
                                          for (double x : v) m = std::max(m, x);
                                          return m;
                                        });
  rep.empirical_e_sup = mean_of(sups);
  rep.se = sd_of(sups, rep.empirical_e_sup) / std::sqrt(static_cast<double>(sups.size()));
  const double a = std::sqrt(m2.value / (4.0 * m0));
  rep.bound_shape = std::sqrt(m0 * std::max(std::log(a * N), 1.0));
  rep.implied_K = rep.empirical_e_sup / rep.bound_shape;
  return rep;
}

DudleyReport dudley_sup_antiderivative(const SpectralMeasure& rho, double b, double gamma,
                                       double N, long n_samples, const RngSpec& rng) {
  if (!(gamma >= 0.0 && gamma < 2.0))
    throw std::invalid_argument("dudley_sup_antiderivative: need 0 <= gamma < 2");
  // precondition: rho([0,lam]) <= b lam^gamma, spot-checked on a log grid
  for (int i = 0; i <= 160; ++i) {
    const double lam = std::pow(10.0, -3.0 + 5.0 * i / 160.0);
    if (rho.cumulative_mass(lam) > b * std::pow(lam, gamma) * (1.0 + 1e-9))
      throw std::domain_error("dudley_sup_antiderivative: cumulative bound fails at lambda=" +
                              std::to_string(lam));
  }
  const double m0 = rho.total_mass();
  PathGrid grid;
  grid.domain = rho.domain;
  grid.start = 0.0;
  grid.step = std::max(N / 1024.0, 1.0 / 16.0);
  if (rho.domain == Domain::IntegerTime) grid.step = 1.0;
  grid.count = static_cast<int>(std::floor(N / grid.step)) + 1;
  PathSampler sampler(rho, grid, true);
  const double h = grid.step;
  std::vector<double> sups =
      path_stats(sampler, n_samples, rng.seed, 0, [&](const std::vector<double>& v) {
        // running trapezoid integral, sup over grid points
        double acc = 0.0, m = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) {
          acc += 0.5 * h * (v[i - 1] + v[i]);
          m = std::max(m, acc);
        }
        return m;
      });
  DudleyReport rep;
  rep.grid_step = h;
  rep.empirical_e_sup = mean_of(sups);
  rep.se = sd_of(sups, rep.empirical_e_sup) / std::sqrt(static_cast<double>(sups.size()));
  rep.bound_shape = std::sqrt(b * m0) * std::pow(N, 1.0 - gamma / 2.0);
  rep.implied_K = rep.empirical_e_sup / rep.bound_shape;
  return rep;
}

AntiderivVariance antideriv_variance(const SpectralMeasure& rho, double N, double b,
                                     double gamma) {
  if (rho.domain != Domain::ContinuousTime)
    throw std::invalid_argument("antideriv_variance: continuous-time measures only");
  AntiderivVariance out;
  double acc = 0.0, err = 0.0;
  for (const auto& at : rho.atoms) {
    const double wm = at.mass * rho.weight_at(at.freq);
    acc += wm * std::pow(sinc(N * at.freq / 2.0), 2);
  }
  for (const auto& seg : rho.segments) {
    auto f = [&](double lam) {
      return seg.density(lam) * rho.weight_at(lam) * std::pow(sinc(N * lam / 2.0), 2);
    };
    if (seg.unbounded()) {
      QuadResult head = integrate(f, seg.a, seg.a + 16.0 * M_PI / N, 1e-12, 400000);
      QuadResult tail = integrate_oscillatory_tail(f, seg.a + 16.0 * M_PI / N,
                                                   2.0 * M_PI / N, 1e-12, 40000);
      acc += 2.0 * (head.value + tail.value);
      err += 2.0 * (head.error + tail.error);
    } else {
      QuadResult q = integrate(f, seg.a, seg.b, 1e-12, 2000000);
      acc += 2.0 * q.value;
      err += 2.0 * q.error;
    }
  }
  out.value = N * N * acc;
  out.quad_error = N * N * err;
  if (b >= 0.0 && gamma >= 0.0 && gamma < 2.0) {
    out.bound_checked = true;
    out.bound = 16.0 * b / (2.0 - gamma) * rho.total_mass() * std::pow(N, 2.0 - gamma);
    out.bound_ok = out.value <= out.bound * (1.0 + 1e-9) + out.quad_error;
  }
  return out;
}

CheckReport iid_average_bound_check(const std::vector<double>& b_vector, double q) {
  if (b_vector.empty()) throw std::invalid_argument("iid_average_bound_check: empty vector");
  const double mean = mean_of(b_vector);
  if (!(mean <= q + 1e-12))
    throw std::invalid_argument("iid_average_bound_check: mean(b) must be <= q");
  double lhs = 0.0;
  for (double bj : b_vector) lhs += log_normal_cdf(bj);
  const double rhs = static_cast<double>(b_vector.size()) * log_normal_cdf(q);
  CheckReport rep;
  rep.name = "iid_average_bound";
  rep.detail = "log-space product bound, N=" + std::to_string(b_vector.size());
  rep.margin = (rhs - lhs) / std::max(1.0, std::abs(rhs));
  rep.pass = rep.margin >= -1e-12;
  return rep;
}

int cyclic_shift_witness(const std::vector<double>& f_values, const std::vector<int>& S,
                         double L) {
  const int N = static_cast<int>(f_values.size());
  if (N == 0 || S.empty()) throw std::invalid_argument("cyclic_shift_witness: empty input");
  if (!(mean_of(f_values) <= L + 1e-12))
    throw std::invalid_argument("cyclic_shift_witness: mean(f) must be <= L");
  for (int tau = 0; tau < N; ++tau) {
    double s = 0.0;
    for (int n : S) s += f_values[((n + tau) % N + N) % N];
    if (s / static_cast<double>(S.size()) <= L + 1e-12) return tau;
  }
  throw std::logic_error("cyclic_shift_witness: averaging argument failed numerically");
}

LargeBallReport large_ball_check(const SpectralMeasure& rho, double c,
                                 const std::vector<double>& ell_grid, double N,
                                 long n_samples, const RngSpec& rng) {
  if (!(c >= 1.0)) throw std::invalid_argument("large_ball_check: c must be >= 1");
  if (rho.domain != Domain::ContinuousTime)
    throw std::invalid_argument("large_ball_check: continuous-time measures only");
  if (!(rho.declared_delta > 0.0))
    throw std::domain_error("large_ball_check: measure must declare a finite m_delta");
  PathGrid grid;
  grid.domain = Domain::ContinuousTime;
  grid.start = 0.0;
  grid.step = 1.0 / 16.0;
  grid.count = static_cast<int>(std::floor(N * 16.0)) + 1;
  PathSampler sampler(rho, grid, true);
  std::vector<double> sups = path_stats(
      sampler, n_samples, rng.seed, 0,
      [](const std::vector<double>& v) { return max_abs(v); });
  const double sd0 = std::sqrt(rho.covariance(0.0));
  LargeBallReport rep;
  rep.ell_grid = ell_grid;
  for (double ell : ell_grid) {
    long cnt = 0;
    for (double s : sups) cnt += (s <= ell) ? 1 : 0;
    const double lhs = static_cast<double>(cnt) / static_cast<double>(sups.size());
    const double se = std::sqrt(
        std::max(lhs * (1 - lhs), 1.0 / static_cast<double>(sups.size())) /
        static_cast<double>(sups.size()));
    const double rhs = std::exp(N * log_normal_ball(ell / (c * sd0)));
    rep.lhs.push_back(lhs);
    rep.lhs_se.push_back(se);
    rep.rhs.push_back(rhs);
    if (!rep.any_pass && lhs >= rhs - 3.0 * se) {
      rep.any_pass = true;
      rep.smallest_passing_ell = ell;
    }
  }
  return rep;
}

}  // namespace gsp
