#include "gsp/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gsp/quadrature.hpp"
#include "gsp/special.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::MatrixXd to_correlation(const Eigen::MatrixXd& sigma) {
  const int n = static_cast<int>(sigma.rows());
  Eigen::VectorXd sd(n);
  for (int i = 0; i < n; ++i) {
    const double v = sigma(i, i);
    if (!(v > 0.0)) throw std::domain_error("orthant: zero-variance coordinate");
    sd(i) = std::sqrt(v);
  }
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = sigma(i, j) / (sd(i) * sd(j));
  return r;
}

double clamp_corr(double r) { return std::clamp(r, -1.0 + 1e-12, 1.0 - 1e-12); }

double orthant2(double r) {
  return 0.25 + std::asin(std::clamp(r, -1.0, 1.0)) / kTwoPi;
}

double orthant3(double r01, double r02, double r12) {
  return 0.125 + (std::asin(std::clamp(r01, -1.0, 1.0)) +
                  std::asin(std::clamp(r02, -1.0, 1.0)) +
                  std::asin(std::clamp(r12, -1.0, 1.0))) /
                     (2.0 * kTwoPi);
}

// Conditional correlation of the remaining coordinates given (X_i, X_j) = (0,0).
Eigen::MatrixXd cond_corr(const Eigen::MatrixXd& r, int i, int j) {
  const int n = static_cast<int>(r.rows());
  const double rij = clamp_corr(r(i, j));
  const double den = 1.0 - rij * rij;
  std::vector<int> rest;
  rest.reserve(n - 2);
  for (int p = 0; p < n; ++p)
    if (p != i && p != j) rest.push_back(p);
  const int m = static_cast<int>(rest.size());
  Eigen::MatrixXd c(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const int p = rest[a], q = rest[b];
      const double v = r(p, q) - (r(p, i) * (r(q, i) - rij * r(q, j)) +
                                  r(p, j) * (r(q, j) - rij * r(q, i))) /
                                     den;
      c(a, b) = v;
      c(b, a) = v;
    }
  }
  Eigen::VectorXd d(m);
  for (int a = 0; a < m; ++a) d(a) = std::sqrt(std::max(c(a, a), 1e-14));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) c(a, b) = std::clamp(c(a, b) / (d(a) * d(b)), -1.0, 1.0);
  return c;
}

double orthant_core(const Eigen::MatrixXd& r, double tol);

// Plackett path derivative: dP/dt along R(t) = I + t(R - I).
double plackett_integrand(const Eigen::MatrixXd& r, double t, double tol) {
  const int n = static_cast<int>(r.rows());
  Eigen::MatrixXd rt = Eigen::MatrixXd::Identity(n, n) + t * (r - Eigen::MatrixXd::Identity(n, n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double rho = r(i, j);
      if (rho == 0.0) continue;
      const double rij = clamp_corr(rt(i, j));
      const double dens = 1.0 / (kTwoPi * std::sqrt(1.0 - rij * rij));
      const double q = orthant_core(cond_corr(rt, i, j), tol);
      sum += rho * dens * q;
    }
  }
  return sum;
}

double orthant_core(const Eigen::MatrixXd& r, double tol) {
  const int n = static_cast<int>(r.rows());
  switch (n) {
    case 0: return 1.0;
    case 1: return 0.5;
    case 2: return orthant2(r(0, 1));
    case 3: return orthant3(r(0, 1), r(0, 2), r(1, 2));
    default: break;
  }
  const double inner_tol = std::max(tol * 0.1, 1e-12);
  QuadResult q = integrate([&](double t) { return plackett_integrand(r, t, inner_tol); },
                           0.0, 1.0, tol * 0.5, 400000);
  return std::ldexp(1.0, -n) + q.value;
}

}  // namespace

double exact_orthant_small(const Eigen::MatrixXd& sigma, double abs_tol) {
  const int n = static_cast<int>(sigma.rows());
  if (n < 1 || n > 7) throw std::invalid_argument("exact_orthant_small: dim must be 1..7");
  Eigen::MatrixXd r = to_correlation(sigma);
  if (n >= 4) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-10)
      throw std::domain_error("exact_orthant_small: matrix not positive definite");
  }
  return std::clamp(orthant_core(r, abs_tol), 0.0, 1.0);
}

namespace {

struct GenzPlan {
  int n = 0;
  Eigen::MatrixXd chol;          // lower triangular, reordered
  std::vector<double> lo, hi;    // reordered standardized limits
};

double genz_sample(const GenzPlan& plan, CounterRng& gen, std::vector<double>& y);

// Gaussian approximation of the constrained law by expectation propagation,
// used as an importance proposal when the plain sequential proposal degenerates
// (thin cones from near-singular covariances). Any proposal keeps the
// estimator unbiased; EP keeps the weights sane.
struct EpProposal {
  bool valid = false;
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower Cholesky of the EP covariance (plan order)
};

double hazard(double a) {
  if (a > 30.0) return a + 1.0 / a;
  return std::exp(-0.5 * a * a - 0.91893853320467274 - log_normal_ccdf(a));
}

EpProposal make_ep(const GenzPlan& plan) {
  EpProposal ep;
  const int n = plan.n;
  for (int i = 0; i < n; ++i) {
    if (plan.hi[i] != kInf || plan.lo[i] == -kInf) return ep;  // one-sided only
    if (plan.chol(i, i) <= 1e-10) return ep;  // degenerate target support
  }
  const Eigen::MatrixXd sigma = plan.chol * plan.chol.transpose();
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd v = sigma;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  const double damp = 0.5;
  for (int sweep = 0; sweep < 80; ++sweep) {
    // refresh the global approximation: V = (Sigma^-1 + diag(tau))^-1 via the
    // Woodbury form that tolerates near-singular Sigma
    Eigen::VectorXd root = tau.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) += root(i) * sigma(i, j) * root(j);
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) return ep;
    Eigen::MatrixXd sr = sigma;
    for (int i = 0; i < n; ++i) sr.col(i) *= root(i);
    v = sigma - sr * llt.solve(sr.transpose());
    m = v * nu;
    // site updates (parallel EP with damping)
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double vii = std::max(v(i, i), 1e-14);
      const double cav_prec = 1.0 / vii - tau(i);
      if (cav_prec <= 1e-12) continue;
      const double cav_var = 1.0 / cav_prec;
      const double cav_mean = cav_var * (m(i) / vii - nu(i));
      const double sd = std::sqrt(cav_var);
      const double alpha = (plan.lo[i] - cav_mean) / sd;
      const double h = hazard(alpha);
      const double mean_t = cav_mean + sd * h;
      const double var_t = std::max(cav_var * (1.0 - h * (h - alpha)), 1e-12 * cav_var);
      const double tau_new = std::max(1.0 / var_t - cav_prec, 0.0);
      const double nu_new = mean_t / var_t - cav_mean * cav_prec;
      change = std::max(change, std::abs(tau_new - tau(i)));
      tau(i) += damp * (tau_new - tau(i));
      nu(i) += damp * (nu_new - nu(i));
    }
    if (change < 1e-8 && sweep > 4) break;
  }
  if (!m.allFinite() || !v.allFinite()) return ep;
  Eigen::MatrixXd vj = v + 1e-10 * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(vj);
  if (llt.info() != Eigen::Success) return ep;
  ep.mean = m;
  ep.chol = llt.matrixL();
  ep.valid = true;
  return ep;
}

// Log-weight of one EP-guided sample: exact target density over exact proposal
// density along the sequentially truncated draw.
double genz_sample_ep(const GenzPlan& plan, const EpProposal& ep, CounterRng& gen,
                      std::vector<double>& x, std::vector<double>& z) {
  const int n = plan.n;
  double logq = 0.0;
  for (int i = 0; i < n; ++i) {
    double mu = ep.mean(i);
    for (int j = 0; j < i; ++j) mu += ep.chol(i, j) * z[j];
    const double sd = ep.chol(i, i);
    const double c = (plan.lo[i] - mu) / sd;
    const double u = gen.uniform();
    const double tc = normal_ccdf(c);
    const double v = u * tc;
    const double r = (v > 1e-300) ? -normal_quantile(v) : c;
    z[i] = r;
    x[i] = mu + sd * r;
    logq += -0.5 * r * r - 0.91893853320467274 - std::log(sd) - log_normal_ccdf(c);
  }
  // target log-density through the plan Cholesky whitening
  double logt = 0.0;
  for (int i = 0; i < n; ++i) {
    double num = x[i];
    for (int j = 0; j < i; ++j) num -= plan.chol(i, j) * z[j];  // reuse z as target residuals
    const double r = num / plan.chol(i, i);
    z[i] = r;
    logt += -0.5 * r * r - 0.91893853320467274 - std::log(plan.chol(i, i));
  }
  return logt - logq;
}

struct PilotScore {
  double log_mean = -kInf;
  double ess_frac = 0.0;
};

PilotScore pilot_run(const GenzPlan& plan, const EpProposal* ep, std::uint64_t seed,
                     int n_pilot) {
  CounterRng gen(seed, 0x70696c6f74ull);  // reserved pilot stream
  std::vector<double> y(plan.n, 0.0), z(plan.n, 0.0);
  double max_w = -kInf, s1 = 0.0, s2 = 0.0;
  for (int s = 0; s < n_pilot; ++s) {
    const double w = ep ? genz_sample_ep(plan, *ep, gen, y, z)
                        : genz_sample(plan, gen, y);
    if (w == -kInf) continue;
    if (w > max_w) {
      const double r = std::exp(max_w - w);
      s1 = s1 * r + 1.0;
      s2 = s2 * r * r + 1.0;
      max_w = w;
    } else {
      const double r = std::exp(w - max_w);
      s1 += r;
      s2 += r * r;
    }
  }
  PilotScore out;
  if (s1 <= 0.0) return out;
  out.log_mean = max_w + std::log(s1 / n_pilot);
  out.ess_frac = s1 * s1 / (s2 * static_cast<double>(n_pilot));
  return out;
}

// Greedy variable reordering (smallest conditional probability first) fused with
// the Cholesky factorization.
GenzPlan make_plan(const Eigen::MatrixXd& sigma, std::vector<double> lo,
                   std::vector<double> hi) {
  const int n = static_cast<int>(sigma.rows());
  Eigen::MatrixXd c = to_correlation(sigma);
  for (int i = 0; i < n; ++i) {
    const double sd = std::sqrt(sigma(i, i));
    if (lo[i] != -kInf) lo[i] /= sd;
    if (hi[i] != kInf) hi[i] /= sd;
  }
  GenzPlan plan;
  plan.n = n;
  plan.chol = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd& L = plan.chol;
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_prob = kInf;
    for (int j = i; j < n; ++j) {
      double s2 = c(j, j);
      double num = 0.0;
      for (int m = 0; m < i; ++m) {
        s2 -= L(j, m) * L(j, m);
        num += L(j, m) * y[m];
      }
      const double denom = std::sqrt(std::max(s2, 0.0));
      double prob;
      if (denom <= 1e-12) {
        prob = (lo[j] - num <= 0.0 && 0.0 <= hi[j] - num) ? 1.0 : 0.0;
      } else {
        const double pa = (lo[j] == -kInf) ? 0.0 : normal_cdf((lo[j] - num) / denom);
        const double pb = (hi[j] == kInf) ? 1.0 : normal_cdf((hi[j] - num) / denom);
        prob = pb - pa;
      }
      if (prob < best_prob) {
        best_prob = prob;
        best = j;
      }
    }
    if (best != i) {
      c.row(i).swap(c.row(best));
      c.col(i).swap(c.col(best));
      L.row(i).swap(L.row(best));
      std::swap(lo[i], lo[best]);
      std::swap(hi[i], hi[best]);
    }
    double s2 = c(i, i);
    double num = 0.0;
    for (int m = 0; m < i; ++m) {
      s2 -= L(i, m) * L(i, m);
      num += L(i, m) * y[m];
    }
    const double lii = std::sqrt(std::max(s2, 0.0));
    L(i, i) = lii;
    for (int j = i + 1; j < n; ++j) {
      if (lii <= 1e-12) {
        L(j, i) = 0.0;
        continue;
      }
      double v = c(j, i);
      for (int m = 0; m < i; ++m) v -= L(i, m) * L(j, m);
      L(j, i) = v / lii;
    }
    // expected value of the truncated residual, for the reordering heuristic
    if (lii > 1e-12) {
      const double a = (lo[i] == -kInf) ? -kInf : (lo[i] - num) / lii;
      const double b = (hi[i] == kInf) ? kInf : (hi[i] - num) / lii;
      const double pa = (a == -kInf) ? 0.0 : normal_cdf(a);
      const double pb = (b == kInf) ? 1.0 : normal_cdf(b);
      const double da = (a == -kInf) ? 0.0 : normal_pdf(a);
      const double db = (b == kInf) ? 0.0 : normal_pdf(b);
      y[i] = (pb - pa > 1e-300) ? (da - db) / (pb - pa) : 0.0;
    } else {
      y[i] = 0.0;
    }
  }
  plan.lo = std::move(lo);
  plan.hi = std::move(hi);
  return plan;
}

// Log-weight of one plain sequential-conditioning sample.
double genz_sample(const GenzPlan& plan, CounterRng& gen, std::vector<double>& y) {
  const int n = plan.n;
  double logw = 0.0;
  for (int i = 0; i < n; ++i) {
    double num = 0.0;
    for (int m = 0; m < i; ++m) num += plan.chol(i, m) * y[m];
    const double lii = plan.chol(i, i);
    if (lii <= 1e-12) {
      y[i] = 0.0;
      if (!(plan.lo[i] - num <= 1e-9 && -1e-9 <= plan.hi[i] - num)) return -kInf;
      continue;
    }
    const double a = (plan.lo[i] == -kInf) ? -kInf : (plan.lo[i] - num) / lii;
    const double b = (plan.hi[i] == kInf) ? kInf : (plan.hi[i] - num) / lii;
    const double u = gen.uniform();
    if (b == kInf) {
      logw += log_normal_ccdf(a);
      const double ta = normal_ccdf(a);
      const double v = u * ta;
      y[i] = (v > 1e-300) ? -normal_quantile(v) : a;
    } else if (a == -kInf) {
      logw += log_normal_cdf(b);
      const double tb = normal_cdf(b);
      const double v = u * tb;
      y[i] = (v > 1e-300) ? normal_quantile(v) : b;
    } else {
      // mirror into the upper tail when both limits are positive
      if (a > 0.0) {
        const double ta = normal_ccdf(a), tb = normal_ccdf(b);
        const double f = ta - tb;
        if (!(f > 0.0)) return -kInf;
        logw += std::log(f);
        y[i] = -normal_quantile(tb + u * f);
      } else {
        const double pa = normal_cdf(a), pb = normal_cdf(b);
        const double f = pb - pa;
        if (!(f > 0.0)) return -kInf;
        logw += std::log(f);
        y[i] = normal_quantile(pa + u * f);
      }
    }
  }
  return logw;
}

struct BatchStat {
  double max_log = -kInf;
  double sumexp = 0.0;   // sum of exp(w - max_log)
  double sumexp2 = 0.0;  // sum of exp(2(w - max_log)), for the ESS diagnostic
  long count = 0;

  void add(double w) {
    ++count;
    if (w == -kInf) return;
    if (w > max_log) {
      const double r = std::exp(max_log - w);
      sumexp = sumexp * r + 1.0;
      sumexp2 = sumexp2 * r * r + 1.0;
      max_log = w;
    } else {
      const double r = std::exp(w - max_log);
      sumexp += r;
      sumexp2 += r * r;
    }
  }
  double log_mean() const {
    if (count == 0 || sumexp == 0.0) return -kInf;
    return max_log + std::log(sumexp / static_cast<double>(count));
  }
};

MvnEstimate merge_batches(const std::vector<BatchStat>& stats) {
  MvnEstimate est;
  est.n_batches = static_cast<int>(stats.size());
  double max_log = -kInf;
  for (const auto& s : stats) {
    est.n_samples += s.count;
    if (s.sumexp > 0.0) max_log = std::max(max_log, s.max_log);
  }
  if (max_log == -kInf) {
    est.log_p = -kInf;
    est.se_log = kInf;
    est.low_confidence = true;
    return est;
  }
  double total = 0.0, total2 = 0.0;
  for (const auto& s : stats) {
    if (s.sumexp <= 0.0) continue;
    const double r = std::exp(s.max_log - max_log);
    total += s.sumexp * r;
    total2 += s.sumexp2 * r * r;
  }
  est.log_p = max_log + std::log(total / static_cast<double>(est.n_samples));
  est.ess = (total2 > 0.0) ? total * total / total2 : 0.0;
  // batch-mean standard error of log p
  double mean_q = 0.0, m2 = 0.0;
  long nb = 0;
  for (const auto& s : stats) {
    const double lb = s.log_mean();
    const double q = (lb == -kInf) ? 0.0 : std::exp(lb - est.log_p);
    ++nb;
    const double d = q - mean_q;
    mean_q += d / static_cast<double>(nb);
    m2 += d * (q - mean_q);
  }
  if (nb > 1 && mean_q > 0.0) {
    const double sd = std::sqrt(m2 / static_cast<double>(nb - 1));
    est.se_log = sd / (mean_q * std::sqrt(static_cast<double>(nb)));
  } else {
    est.se_log = kInf;
  }
  est.low_confidence = !(est.se_log <= 1.0) || est.ess < 64.0;
  return est;
}

MvnEstimate run_mvn_mc(const Eigen::MatrixXd& sigma, const std::vector<double>& lower,
                       const std::vector<double>& upper, long n_samples,
                       const RngSpec& rng, int n_batches, bool parallel) {
  const int n = static_cast<int>(sigma.rows());
  if (n < 1) throw std::invalid_argument("mvn_box_mc: empty matrix");
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw std::invalid_argument("mvn_box_mc: limit size mismatch");
  if (n_samples < 1) throw std::invalid_argument("mvn_box_mc: n_samples must be >= 1");
  n_batches = std::max(32, n_batches);
  GenzPlan plan = make_plan(sigma, lower, upper);
  // escalate to the EP-guided proposal when the plain one degenerates
  EpProposal ep;
  PilotScore plain = pilot_run(plan, nullptr, rng.seed, 256);
  if (plain.ess_frac < 0.02) {
    EpProposal cand = make_ep(plan);
    if (cand.valid) {
      PilotScore guided = pilot_run(plan, &cand, rng.seed, 256);
      if (guided.log_mean > plain.log_mean + 2.0 ||
          (plain.log_mean == -kInf && guided.log_mean > -kInf)) {
        ep = std::move(cand);
      }
    }
  }
  const long per = (n_samples + n_batches - 1) / n_batches;
  std::vector<BatchStat> stats(n_batches);

  auto kernel = [&](int b) {
    CounterRng gen(rng.seed, static_cast<std::uint64_t>(b));
    std::vector<double> y(plan.n, 0.0), z(plan.n, 0.0);
    BatchStat st;
    if (ep.valid) {
      for (long s = 0; s < per; ++s) st.add(genz_sample_ep(plan, ep, gen, y, z));
    } else {
      for (long s = 0; s < per; ++s) st.add(genz_sample(plan, gen, y));
    }
    stats[b] = st;
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < n_batches; ++b) kernel(b);
  } else {
    for (int b = 0; b < n_batches; ++b) kernel(b);
  }
  return merge_batches(stats);
}

}  // namespace

MvnEstimate mvn_box_mc(const Eigen::MatrixXd& sigma, const std::vector<double>& lower,
                       const std::vector<double>& upper, long n_samples,
                       const RngSpec& rng, bool parallel, int n_batches) {
  return run_mvn_mc(sigma, lower, upper, n_samples, rng, n_batches, parallel);
}

MvnEstimate mvn_box_mc_serial(const Eigen::MatrixXd& sigma,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper, long n_samples,
                              const RngSpec& rng, int n_batches) {
  return run_mvn_mc(sigma, lower, upper, n_samples, rng, n_batches, false);
}

MvnEstimate genz_orthant(const Eigen::MatrixXd& sigma, long n_samples,
                         const RngSpec& rng, bool parallel) {
  const int n = static_cast<int>(sigma.rows());
  if (n > 512) throw std::invalid_argument("genz_orthant: dimension above the 512 cap");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, sigma.diagonal().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::domain_error("genz_orthant: covariance not PSD within tolerance");
  const std::vector<double> lower(n, 0.0);
  const std::vector<double> upper(n, kInf);
  return run_mvn_mc(sigma, lower, upper, n_samples, rng, 64, parallel);
}

}  // namespace gsp
