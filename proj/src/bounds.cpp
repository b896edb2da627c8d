#include "gsp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gsp/rng.hpp"
#include "gsp/special.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kBetaIntegerLower = 2.8284271247461900976033774484194;  // 2*sqrt(2)

// log P(|Z| < x) = log(2 Phi(x) - 1), stable for small x.
double log_ball(double x) { return log_normal_ball(x); }

// golden-section maximum of f over [lo,hi] (log-ell coordinates), multistart.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double* best_x) {
  const double gr = 0.61803398874989484820458683436564;
  double best_val = -kInf, best_arg = lo;
  auto consider = [&](double x) {
    const double v = f(x);
    if (v > best_val) {
      best_val = v;
      best_arg = x;
    }
  };
  const double thirds[4] = {lo, lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0, hi};
  for (int seed = 0; seed < 3; ++seed) {
    double a = thirds[seed], b = thirds[seed + 1];
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120 && (b - a) > 1e-10; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = f(d);
      }
    }
    consider(0.5 * (a + b));
  }
  consider(lo);
  consider(hi);
  if (best_x) *best_x = best_arg;
  return best_val;
}

struct UpperSetup {
  double abs_E = 0.0;   // Lebesgue measure of the symmetric floor set
  double nu = 0.0;
  double q = 1.0;
  double N0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double r = 0.0;
  double ell0 = 0.0;
  int k = 0;
  double s = 0.0;
};

UpperSetup upper_setup(const SpectralMeasure& rho, double N, int k, double s,
                       const BoundParams& params) {
  if (k < 0 || s < 0.0 || s >= 2.0)
    throw std::invalid_argument("upper bound: need k >= 0 and 0 <= s < 2");
  UpperSetup u;
  u.k = k;
  u.s = s;
  u.r = std::max(static_cast<double>(k), s / 2.0);
  std::optional<AcFloor> floor = params.ac_floor ? params.ac_floor : rho.ac_floor;
  if (!floor) {
    // auto-detect only the single-constant-segment case
    if (rho.segments.size() == 1 && rho.segments[0].form == SegmentForm::Constant &&
        rho.multipliers.empty()) {
      floor = AcFloor{rho.segments[0].a, rho.segments[0].b, rho.segments[0].c};
    } else {
      throw std::domain_error("upper bound: declare an ac floor (E, nu) for this measure");
    }
  }
  if (!(floor->nu > 0.0) || !(floor->hi > floor->lo))
    throw std::invalid_argument("upper bound: invalid ac floor");
  // E is the symmetric set +-[lo,hi]; when lo == 0 it is the single interval
  // [-hi,hi], otherwise its largest interval component is [lo,hi] (Remark-2 N0).
  const double width = floor->hi - floor->lo;
  u.abs_E = (floor->lo == 0.0) ? 2.0 * floor->hi : 2.0 * width;
  const double interval_len = (floor->lo == 0.0) ? 2.0 * floor->hi : width;
  u.N0 = 2.0 * kPi / interval_len;
  u.nu = floor->nu;
  u.q = params.q ? *params.q
                 : ((rho.domain == Domain::IntegerTime)
                        ? 1.0
                        : std::max(1.0, rho.support_max() / kPi));
  u.alpha = params.constants.c0 * u.abs_E;

  const double gamma_m2k = 2.0 * k;
  if (!rho.moment_finite(-gamma_m2k))
    throw std::domain_error("upper bound inapplicable: m_{-2k} infinite at k=" +
                            std::to_string(k));
  const double m_2k = rho.moment(-gamma_m2k).value;
  if (k > 0) {
    u.beta = std::pow(params.constants.c1 * k, -static_cast<double>(k)) *
             std::sqrt(u.nu * u.abs_E / m_2k);
  } else {
    if (!rho.moment_finite(-s))
      throw std::domain_error("upper bound inapplicable: m_{-s} infinite");
    const double m_s = rho.moment(-s).value;
    u.beta = params.constants.c_s * std::sqrt(u.nu * u.abs_E / m_s);
  }
  if (!rho.moment_finite(-gamma_m2k + 2.0))
    throw std::domain_error("upper bound inapplicable: m_{-2k+2} infinite");
  const double m_2k2 = rho.moment(-gamma_m2k + 2.0).value;
  const double arg = 0.5 * std::log(m_2k2 / (4.0 * m_2k) * N * N);
  u.ell0 = 2.0 * std::pow(N, -u.r) * std::max(arg > 0.0 ? std::sqrt(arg) : 0.0, 1.0);
  return u;
}

double upper_value(const UpperSetup& u, double N, double ell, BoundFactors* factors) {
  const double tail = log_normal_ccdf(ell * std::pow(N, u.r));
  const double ball = std::log(2.0 * u.q * N) + u.alpha * N * log_ball(ell / u.beta);
  if (factors) {
    factors->tail_term = tail;
    factors->ball_term = ball;
  }
  return log_sum_exp(tail, ball);
}

}  // namespace

BoundResult lower_bound_log(const SpectralMeasure& rho, double N, double ell,
                            const BoundParams& params) {
  if (!(N > 0.0)) throw std::invalid_argument("lower bound: N must be > 0");
  BoundResult res;
  double beta, ell0;
  if (rho.domain == Domain::IntegerTime) {
    beta = kBetaIntegerLower;
    ell0 = 0.0;
  } else {
    if (!params.beta_lower || !params.ell0_lower)
      throw std::domain_error(
          "lower bound over R: supply (beta, ell0); the continuous-time constants "
          "are non-explicit");
    beta = *params.beta_lower;
    ell0 = *params.ell0_lower;
    res.flags.push_back("heuristic");
  }
  if (!(ell > ell0))
    throw std::invalid_argument("lower bound: ell must exceed ell0");
  res.beta_used = beta;
  res.ell0 = ell0;
  res.ell_star = ell;
  const double sigma = std::sqrt(rho.sigma_sq(N));
  if (sigma == 0.0) {
    res.log_bound = -kInf;
    res.factors.tail_term = -kInf;
    res.factors.ball_term = N * log_ball(ell / beta);
    res.flags.push_back("sigma_N = 0: bound degenerates to -inf");
    return res;
  }
  res.factors.tail_term = log_normal_ccdf(ell / sigma);
  res.factors.ball_term = N * log_ball(ell / beta);
  res.log_bound = res.factors.tail_term + res.factors.ball_term;
  return res;
}

BoundResult optimize_lower(const SpectralMeasure& rho, double N,
                           const BoundParams& params) {
  const double sigma = std::sqrt(rho.sigma_sq(N));
  if (sigma == 0.0) return lower_bound_log(rho, N, 1.0, params);
  double ell0 = 0.0;
  if (rho.domain == Domain::ContinuousTime) {
    if (!params.ell0_lower)
      throw std::domain_error("lower bound over R: supply (beta, ell0)");
    ell0 = *params.ell0_lower;
  }
  const double lo = std::log(std::max(ell0 * (1.0 + 1e-9), 1e-6));
  const double hi =
      std::log(std::max({sigma * 20.0, sigma * std::sqrt(32.0 * N), 2e-6, ell0 * 4.0}));
  auto objective = [&](double u) {
    return lower_bound_log(rho, N, std::exp(u), params).log_bound;
  };
  double best_u = lo;
  golden_max(objective, lo, std::max(hi, lo + 1e-6), &best_u);
  return lower_bound_log(rho, N, std::exp(best_u), params);
}

BoundResult upper_bound_log(const SpectralMeasure& rho, double N, double ell,
                            const BoundParams& params) {
  const int k = params.k.value_or(0);
  UpperSetup u = upper_setup(rho, N, k, params.s, params);
  if (!(N > std::max(u.N0, static_cast<double>(k))))
    throw std::domain_error("upper bound needs N > max(N0, k) with N0 = " +
                            std::to_string(u.N0));
  if (!(ell > u.ell0))
    throw std::invalid_argument("upper bound: ell must exceed ell0(N) = " +
                                std::to_string(u.ell0));
  BoundResult res;
  res.k_used = u.k;
  res.s_used = u.s;
  res.beta_used = u.beta;
  res.alpha_used = u.alpha;
  res.ell0 = u.ell0;
  res.ell_star = ell;
  res.log_bound = upper_value(u, N, ell, &res.factors);
  res.flags.push_back("up to universal constants");
  return res;
}

BoundResult optimize_upper(const SpectralMeasure& rho, double N,
                           const BoundParams& params) {
  std::vector<int> ks;
  if (params.k) {
    ks.push_back(*params.k);
  } else {
    const int kmax = k_of_N(rho, N);
    for (int k = 0; k <= kmax; ++k) ks.push_back(k);
  }
  std::optional<BoundResult> best;
  std::string last_error = "no admissible k";
  for (int k : ks) {
    try {
      UpperSetup u = upper_setup(rho, N, k, params.s, params);
      if (!(N > std::max(u.N0, static_cast<double>(k)))) {
        last_error = "N below N0 or k";
        continue;
      }
      const double lo = std::log(u.ell0 * (1.0 + 1e-9));
      const double hi = std::log(u.ell0 * 1e4);
      double best_u = lo;
      golden_max([&](double x) { return -upper_value(u, N, std::exp(x), nullptr); }, lo,
                 hi, &best_u);
      BoundParams pinned = params;
      pinned.k = k;
      BoundResult res = upper_bound_log(rho, N, std::exp(best_u), pinned);
      if (!best || res.log_bound < best->log_bound) best = res;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  if (!best) throw std::domain_error(std::string("optimize_upper inapplicable: ") + last_error);
  return *best;
}

int k_of_N(const SpectralMeasure& rho, double N) {
  if (!(N >= 1.0)) throw std::invalid_argument("k_of_N: N must be >= 1");
  int best = 0;
  const int kcap = static_cast<int>(std::floor(N + 1e-12));
  for (int k = 1; k <= kcap; ++k) {
    if (!rho.moment_finite(-2.0 * k)) break;  // analytic divergence cutoff
    const double m = rho.moment(-2.0 * k).value;
    const double v = k * std::pow(m, 1.0 / k);
    if (v <= N * (1.0 + 1e-12)) best = k;
  }
  return best;
}

std::vector<RegimeClass> envelope(const RegimeFeatures& f, Domain domain) {
  std::vector<RegimeClass> out;
  auto add = [&](RegimeKind kind, RegimeSide side, double expnt, std::string cond) {
    RegimeClass rc;
    rc.kind = kind;
    rc.side = side;
    rc.exponent = expnt;
    rc.conditions = std::move(cond);
    out.push_back(std::move(rc));
  };
  switch (f.origin) {
    case RegimeFeatures::Origin::PowerAlpha: {
      const double a = f.alpha;
      if (a <= -1.0) throw std::invalid_argument("envelope: alpha must exceed -1");
      if (a < 0.0) {
        add(RegimeKind::PowerLog, RegimeSide::Both, 1.0 + a,
            "density ~ c lambda^alpha at 0, alpha < 0: log P =~ -N^(1+alpha) log N");
      } else if (a == 0.0) {
        add(RegimeKind::Linear, RegimeSide::Both,
            0.0, "density bounded away from 0 and infinity at the origin: log P =~ -N");
      } else {
        add(RegimeKind::NLogN, RegimeSide::Upper, 0.0,
            "density vanishing like lambda^alpha, alpha > 0: log P <= -C N log N");
        if (domain == Domain::IntegerTime) {
          add(RegimeKind::NLogN, RegimeSide::Lower, 0.0,
              "integer time: matching -C(gamma-1) N log N lower bound");
        }
        if (domain == Domain::ContinuousTime && a > 1.0 &&
            f.tail == RegimeFeatures::Tail::Power) {
          add(RegimeKind::PowerLog, RegimeSide::Upper, 1.0 + 1.0 / f.tail_alpha,
              "m_{-2} finite with power tail lambda^-alpha_t: log P <= -C N^(1+1/alpha_t) log N");
        }
      }
      break;
    }
    case RegimeFeatures::Origin::Gap: {
      add(RegimeKind::Quadratic, RegimeSide::Upper, 2.0,
          "spectral gap at 0: log P <= -C N^2 (matching e^{-cN^2} lower bound over Z is an "
          "external reference, not computed here)");
      if (domain == Domain::ContinuousTime && f.tail == RegimeFeatures::Tail::Power) {
        add(RegimeKind::ExpExp, RegimeSide::Upper, 0.0,
            "gap plus heavy power tail over R: log P <= -e^{CN}");
      }
      break;
    }
    case RegimeFeatures::Origin::ExpWell: {
      const double A = f.expwell_A;
      add(RegimeKind::PowerLog, RegimeSide::Upper, 1.0 + 1.0 / (1.0 + A),
          "m_{-2k} < k^{Ak}: log P <= -C N^(1+1/(1+A)) log N");
      break;
    }
  }
  if (f.tail == RegimeFeatures::Tail::Log) {
    if (!out.empty())
      out.back().conditions += "; log tail 1/(lambda log^2 lambda) admits e^{C sqrt(N)}-type upper "
          "bounds (remark-level, not classified)";
  }
  return out;
}

SlopeFit slope_fit(const std::vector<CurvePoint>& curve, SlopeModel model,
                   const RngSpec& rng, int bootstrap) {
  std::vector<double> xs, ys, ses;
  for (const auto& pt : curve) {
    if (pt.failed) continue;
    const double lp = pt.estimate.log_p;
    if (!std::isfinite(lp) || lp >= 0.0) throw std::invalid_argument("slope_fit: log_p must be finite and negative");
    if (!(pt.estimate.se_log < 0.5 * std::abs(lp)))
      throw std::invalid_argument("slope_fit: se_log too large relative to |log_p|");
    xs.push_back(std::log(pt.N));
    ys.push_back(std::log(-lp));
    ses.push_back(pt.estimate.se_log);
  }
  if (xs.size() < 4) throw std::invalid_argument("slope_fit: need at least 4 points");

  auto fit_once = [&](const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double yi = y[i];
      if (model == SlopeModel::PowerTimesLog) yi -= std::log(xs[i]);  // remove log log N
      sx += xs[i];
      sy += yi;
      sxx += xs[i] * xs[i];
      sxy += xs[i] * yi;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };

  SlopeFit fit;
  fit.exponent = fit_once(ys);
  std::vector<double> boots;
  boots.reserve(bootstrap);
  CounterRng gen(rng.seed, 0);
  std::vector<double> y2(ys.size());
  for (int b = 0; b < bootstrap; ++b) {
    for (std::size_t i = 0; i < ys.size(); ++i) {
      // resample log_p within its standard error, then refit
      const double lp = -std::exp(ys[i]) + ses[i] * gen.gaussian();
      y2[i] = std::log(std::max(-lp, 1e-12));
    }
    boots.push_back(fit_once(y2));
  }
  std::sort(boots.begin(), boots.end());
  if (!boots.empty()) {
    fit.ci_lo = boots[static_cast<std::size_t>(0.025 * (boots.size() - 1))];
    fit.ci_hi = boots[static_cast<std::size_t>(0.975 * (boots.size() - 1))];
  } else {
    fit.ci_lo = fit.ci_hi = fit.exponent;
  }
  return fit;
}

}  // namespace gsp
