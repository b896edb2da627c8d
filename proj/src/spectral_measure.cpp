#include "gsp/spectral_measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gsp/quadrature.hpp"

namespace gsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279503;

double pow_int(double e, double lo, double hi) {
  // integral of lam^e over [lo,hi], assuming convergence already established
  if (e == -1.0) return std::log(hi / lo);
  const double ep1 = e + 1.0;
  const double hi_part = (hi == kInf) ? 0.0 : std::pow(hi, ep1);
  const double lo_part = (lo == 0.0) ? 0.0 : std::pow(lo, ep1);
  return (hi_part - lo_part) / ep1;
}

struct MultInfo {
  double power_shift = 0.0;  // sum of PowerLaw exponents
  int cos_plus = 0;          // count of 2(1-cos) factors
  int cos_minus = 0;         // count of 1/(2(1-cos)) factors
  bool pure_power() const { return cos_plus == 0 && cos_minus == 0; }
  // exponent shift contributed near lambda = 0
  double origin_shift() const { return power_shift + 2.0 * (cos_plus - cos_minus); }
};

MultInfo summarize(const std::vector<Multiplier>& ms) {
  MultInfo info;
  for (const auto& m : ms) {
    switch (m.kind) {
      case Multiplier::PowerLaw: info.power_shift += m.p; break;
      case Multiplier::OneMinusCos: ++info.cos_plus; break;
      case Multiplier::InvOneMinusCos: ++info.cos_minus; break;
    }
  }
  return info;
}

struct SegPiece {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
  bool converged = true;
};

// Exponent of the full integrand lam^delta * w(lam) * weight(lam) near 0.
double origin_exponent(const DensitySegment& seg, const MultInfo& mi, double delta) {
  double e = delta + mi.origin_shift();
  if (seg.form == SegmentForm::Power) e += seg.alpha;
  return e;
}

// One-sided integral over [lo,hi] of lam^delta * w(lam) * weight(lam) * cos(lam*t).
// Pass t = NaN for no cosine factor. Finiteness is decided analytically.
SegPiece seg_piece(const DensitySegment& seg, const std::vector<Multiplier>& mults,
                   const MultInfo& mi, double lo, double hi, double delta, double t,
                   double tol) {
  SegPiece out;
  lo = std::max(lo, seg.a);
  hi = std::min(hi, seg.b);
  if (!(hi > lo)) return out;
  const bool has_cos = !std::isnan(t) && t != 0.0;

  // analytic finiteness at the endpoints
  if (lo == 0.0 && seg.form != SegmentForm::ExpWell) {
    if (origin_exponent(seg, mi, delta) <= -1.0) {
      out.finite = false;
      return out;
    }
  }
  if (hi == kInf) {
    const double d = delta + mi.power_shift;
    if (seg.form == SegmentForm::PowerTail) {
      if (!(d - seg.alpha < -1.0)) { out.finite = false; return out; }
    } else if (seg.form == SegmentForm::LogTail) {
      if (d > 0.0) { out.finite = false; return out; }
    } else {
      out.finite = false;  // Constant/Power/ExpWell cannot extend to infinity
      return out;
    }
  }

  // closed forms: pure power-law content, no cosine
  if (!has_cos && mi.pure_power()) {
    const double d = delta + mi.power_shift;
    switch (seg.form) {
      case SegmentForm::Constant:
        out.value = seg.c * pow_int(d, lo, hi);
        return out;
      case SegmentForm::Power:
        out.value = seg.c * pow_int(d + seg.alpha, lo, hi);
        return out;
      case SegmentForm::PowerTail:
        out.value = seg.c * pow_int(d - seg.alpha, lo, hi);
        return out;
      case SegmentForm::LogTail:
        if (d == 0.0) {
          const double hi_part = (hi == kInf) ? 0.0 : 1.0 / std::log(hi);
          out.value = seg.c * (1.0 / std::log(lo) - hi_part);
          return out;
        }
        break;  // quadrature below
      case SegmentForm::ExpWell:
        break;  // quadrature below
    }
  }

  auto weight = [&](double lam) {
    double w = 1.0;
    for (const auto& m : mults) {
      switch (m.kind) {
        case Multiplier::PowerLaw: w *= std::pow(lam, m.p); break;
        case Multiplier::OneMinusCos: w *= 2.0 * (1.0 - std::cos(lam)); break;
        case Multiplier::InvOneMinusCos: w /= 2.0 * (1.0 - std::cos(lam)); break;
      }
    }
    return w;
  };
  auto integrand = [&](double lam) {
    double v = seg.density(lam) * weight(lam);
    if (delta != 0.0) v *= std::pow(lam, delta);
    if (has_cos) v *= std::cos(lam * t);
    return v;
  };

  // LogTail to infinity without oscillation: substitute u = log(lam)
  if (hi == kInf && !has_cos && seg.form == SegmentForm::LogTail && mi.pure_power()) {
    const double d = delta + mi.power_shift;
    auto g = [&](double u) { return seg.c * std::exp(d * u) / (u * u); };
    QuadResult q = integrate_to_inf(g, std::log(lo), tol);
    out.value = q.value;
    out.error = q.error;
    out.converged = q.converged;
    return out;
  }

  const double e0 = (lo == 0.0 && seg.form != SegmentForm::ExpWell)
                        ? origin_exponent(seg, mi, delta)
                        : 0.0;
  const bool singular = (lo == 0.0) && (e0 < 0.0) && seg.form != SegmentForm::ExpWell;
  const double panel = has_cos ? kPi / std::abs(t) : kInf;

  double head_hi = hi;
  if (hi == kInf) head_hi = lo + 4.0 * panel;  // oscillatory tail handled below
  double value = 0.0, error = 0.0;
  bool converged = true;

  double x0 = lo;
  if (singular) {
    // u = lam^(1+e0) removes the endpoint singularity exactly
    const double head_end = std::min(head_hi, lo + (has_cos ? panel : (head_hi - lo)));
    const double ep1 = 1.0 + e0;
    auto mapped = [&](double u) {
      const double lam = std::pow(u, 1.0 / ep1);
      return integrand(lam) * std::pow(lam, -e0) / ep1;
    };
    QuadResult q = integrate(mapped, 0.0, std::pow(head_end, ep1), tol * 0.5);
    value += q.value;
    error += q.error;
    converged = converged && q.converged;
    x0 = head_end;
  }
  if (head_hi > x0) {
    if (has_cos && (head_hi - x0) > 4.0 * panel) {
      const long npanels = static_cast<long>(std::ceil((head_hi - x0) / panel));
      const double per_tol = tol / (2.0 * static_cast<double>(npanels));
      double x = x0;
      for (long i = 0; i < npanels; ++i) {
        const double xe = std::min(head_hi, x + panel);
        QuadResult q = integrate(integrand, x, xe, per_tol, 20000);
        value += q.value;
        error += q.error;
        converged = converged && q.converged;
        x = xe;
      }
    } else {
      QuadResult q = integrate(integrand, x0, head_hi, tol * 0.5);
      value += q.value;
      error += q.error;
      converged = converged && q.converged;
    }
  }
  if (hi == kInf) {
    QuadResult q = has_cos
                       ? integrate_oscillatory_tail(integrand, head_hi, panel, tol, 20000)
                       : integrate_to_inf(integrand, head_hi, tol);
    value += q.value;
    error += q.error;
    converged = converged && q.converged;
  }
  out.value = value;
  out.error = error;
  out.converged = converged;
  return out;
}

double atom_weighted_mass(const Atom& at, const std::vector<Multiplier>& mults,
                          bool* infinite) {
  double w = 1.0;
  for (const auto& m : mults) {
    switch (m.kind) {
      case Multiplier::PowerLaw:
        if (at.freq == 0.0) {
          if (m.p > 0.0) w = 0.0;
          else if (m.p < 0.0 && w != 0.0) { *infinite = true; return 0.0; }
        } else {
          w *= std::pow(at.freq, m.p);
        }
        break;
      case Multiplier::OneMinusCos:
        w *= 2.0 * (1.0 - std::cos(at.freq));
        break;
      case Multiplier::InvOneMinusCos: {
        const double d = 2.0 * (1.0 - std::cos(at.freq));
        if (d == 0.0) {
          if (w != 0.0) { *infinite = true; return 0.0; }
        } else {
          w /= d;
        }
        break;
      }
    }
  }
  return at.mass * w;
}

}  // namespace

double DensitySegment::density(double lam) const {
  switch (form) {
    case SegmentForm::Constant: return c;
    case SegmentForm::Power: return c * std::pow(lam, alpha);
    case SegmentForm::ExpWell: return c * std::exp(-std::pow(lam, -A));
    case SegmentForm::PowerTail: return c * std::pow(lam, -alpha);
    case SegmentForm::LogTail: {
      const double l = std::log(lam);
      return c / (lam * l * l);
    }
  }
  return 0.0;
}

void SpectralMeasure::validate() const {
  const double lim = (domain == Domain::IntegerTime) ? kPi * (1.0 + 1e-12) : kInf;
  for (const auto& at : atoms) {
    if (at.freq < 0.0) throw std::invalid_argument("atom frequency must be >= 0");
    if (at.mass < 0.0) throw std::invalid_argument("atom mass must be >= 0");
    if (at.freq > lim) throw std::invalid_argument("integer-time atom beyond pi");
  }
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string tag = "segment " + std::to_string(i);
    if (!(s.c > 0.0)) throw std::invalid_argument(tag + ": scale c must be > 0");
    if (!(s.a >= 0.0) || !(s.b > s.a))
      throw std::invalid_argument(tag + ": support must satisfy 0 <= a < b");
    if (s.b > lim) throw std::invalid_argument(tag + ": integer-time support beyond pi");
    if (s.unbounded() && domain == Domain::IntegerTime)
      throw std::invalid_argument(tag + ": unbounded support over integer time");
    switch (s.form) {
      case SegmentForm::Constant:
        if (s.unbounded()) throw std::invalid_argument(tag + ": constant segment to infinity is non-integrable");
        break;
      case SegmentForm::Power:
        if (s.a == 0.0 && !(s.alpha > -1.0))
          throw std::invalid_argument(tag + ": power segment at 0 needs alpha > -1");
        if (s.unbounded()) throw std::invalid_argument(tag + ": power segment to infinity is non-integrable");
        break;
      case SegmentForm::ExpWell:
        if (!(s.A > 0.0)) throw std::invalid_argument(tag + ": expwell needs A > 0");
        if (s.unbounded()) throw std::invalid_argument(tag + ": expwell segment to infinity is non-integrable");
        break;
      case SegmentForm::PowerTail:
        if (!(s.a > 0.0)) throw std::invalid_argument(tag + ": powertail needs a > 0");
        if (s.unbounded() && !(s.alpha > 1.0))
          throw std::invalid_argument(tag + ": powertail to infinity needs alpha > 1");
        break;
      case SegmentForm::LogTail:
        if (!(s.a > 1.0)) throw std::invalid_argument(tag + ": logtail needs a > 1");
        break;
    }
    spans.emplace_back(s.a, s.b);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second - 1e-15)
      throw std::invalid_argument("segments must have disjoint supports");
  }
  if (atoms.empty() && segments.empty())
    throw std::invalid_argument("measure has no mass");
  if (declared_delta < 0.0)
    throw std::invalid_argument("declared delta must be >= 0");
  if (declared_delta > 0.0 && !moment_finite(declared_delta))
    throw std::invalid_argument("declared delta-moment is infinite for this measure");
  if (ac_floor) {
    if (!(ac_floor->nu > 0.0) || !(ac_floor->hi > ac_floor->lo) || ac_floor->lo < 0.0)
      throw std::invalid_argument("ac_floor must have nu > 0 and 0 <= lo < hi");
  }
}

double SpectralMeasure::weight_at(double lam) const {
  double w = 1.0;
  for (const auto& m : multipliers) {
    switch (m.kind) {
      case Multiplier::PowerLaw: w *= std::pow(lam, m.p); break;
      case Multiplier::OneMinusCos: w *= 2.0 * (1.0 - std::cos(lam)); break;
      case Multiplier::InvOneMinusCos: w /= 2.0 * (1.0 - std::cos(lam)); break;
    }
  }
  return w;
}

double SpectralMeasure::total_mass() const {
  MomentEntry m0 = moment(0.0);
  if (m0.infinite) throw std::domain_error("total mass diverges (non-integrable segment)");
  return m0.value;
}

MomentEntry SpectralMeasure::moment(double delta) const {
  const MultInfo mi = summarize(multipliers);
  MomentEntry out;
  for (const auto& at : atoms) {
    if (at.mass == 0.0) continue;
    bool inf_flag = false;
    const double wm = atom_weighted_mass(at, multipliers, &inf_flag);
    if (inf_flag) { out.infinite = true; return out; }
    if (at.freq == 0.0) {
      if (wm == 0.0) continue;
      if (delta < 0.0) { out.infinite = true; return out; }
      if (delta == 0.0) out.value += wm;
      // delta > 0: contributes 0
    } else {
      out.value += wm * std::pow(at.freq, delta);
    }
  }
  for (const auto& seg : segments) {
    SegPiece p = seg_piece(seg, multipliers, mi, seg.a, seg.b, delta,
                           std::numeric_limits<double>::quiet_NaN(), 1e-11);
    if (!p.finite) { out.infinite = true; return out; }
    out.value += 2.0 * p.value;
    out.error += 2.0 * p.error;
  }
  return out;
}

bool SpectralMeasure::moment_finite(double delta) const {
  const MultInfo mi = summarize(multipliers);
  for (const auto& at : atoms) {
    if (at.mass == 0.0) continue;
    bool inf_flag = false;
    const double wm = atom_weighted_mass(at, multipliers, &inf_flag);
    if (inf_flag) return false;
    if (at.freq == 0.0 && wm > 0.0 && delta < 0.0) return false;
  }
  for (const auto& seg : segments) {
    if (seg.a == 0.0 && seg.form != SegmentForm::ExpWell) {
      if (origin_exponent(seg, mi, delta) <= -1.0) return false;
    }
    if (seg.unbounded()) {
      const double d = delta + mi.power_shift;
      if (seg.form == SegmentForm::PowerTail && !(d - seg.alpha < -1.0)) return false;
      if (seg.form == SegmentForm::LogTail && d > 0.0) return false;
    }
  }
  return true;
}

double SpectralMeasure::cumulative_mass(double hi) const {
  const MultInfo mi = summarize(multipliers);
  double total = 0.0;
  for (const auto& at : atoms) {
    bool inf_flag = false;
    const double wm = atom_weighted_mass(at, multipliers, &inf_flag);
    if (inf_flag) throw std::domain_error("cumulative mass diverges at an atom");
    if (at.freq == 0.0) total += wm;
    else if (at.freq <= hi) total += 0.5 * wm;
  }
  for (const auto& seg : segments) {
    SegPiece p = seg_piece(seg, multipliers, mi, seg.a, std::min(seg.b, hi), 0.0,
                           std::numeric_limits<double>::quiet_NaN(), 1e-12);
    if (!p.finite) throw std::domain_error("cumulative mass diverges");
    total += p.value;
  }
  return total;
}

double SpectralMeasure::sigma_sq(double N) const {
  if (!(N > 0.0)) throw std::invalid_argument("sigma_sq: N must be > 0");
  return cumulative_mass(1.0 / N);
}

CovValue SpectralMeasure::covariance_detail(double t) const {
  const MultInfo mi = summarize(multipliers);
  CovValue out;
  for (const auto& at : atoms) {
    bool inf_flag = false;
    const double wm = atom_weighted_mass(at, multipliers, &inf_flag);
    if (inf_flag) throw std::domain_error("covariance diverges at an atom");
    out.value += wm * std::cos(at.freq * t);
  }
  for (const auto& seg : segments) {
    SegPiece p = seg_piece(seg, multipliers, mi, seg.a, seg.b, 0.0, t, 5e-11);
    if (!p.finite) throw std::domain_error("covariance integral diverges");
    out.value += 2.0 * p.value;
    out.error += 2.0 * p.error;
    out.converged = out.converged && p.converged;
  }
  return out;
}

double SpectralMeasure::covariance(double t) const { return covariance_detail(t).value; }

SpectralMeasure SpectralMeasure::normalized() const {
  const double m0 = total_mass();
  if (!(m0 > 0.0)) throw std::domain_error("cannot normalize a zero-mass measure");
  SpectralMeasure out = *this;
  for (auto& at : out.atoms) at.mass /= m0;
  for (auto& seg : out.segments) seg.c /= m0;
  if (out.ac_floor) out.ac_floor->nu /= m0;
  return out;
}

double SpectralMeasure::sup_finite_positive_moment() const {
  double sup = kInf;
  for (const auto& seg : segments) {
    if (!seg.unbounded()) continue;
    if (seg.form == SegmentForm::PowerTail) sup = std::min(sup, seg.alpha - 1.0);
    else if (seg.form == SegmentForm::LogTail) sup = std::min(sup, 0.0);
  }
  return sup;
}

double SpectralMeasure::support_max() const {
  double s = 0.0;
  for (const auto& at : atoms) s = std::max(s, at.freq);
  for (const auto& seg : segments) s = std::max(s, seg.b);
  return s;
}

bool SpectralMeasure::has_atom_at_zero() const {
  for (const auto& at : atoms)
    if (at.freq == 0.0 && at.mass > 0.0) return true;
  return false;
}

IbpReport check_ibp(const SpectralMeasure& rho, double gamma,
                    const std::vector<double>& lam_grid) {
  if (!(gamma > 0.0)) throw std::invalid_argument("check_ibp: gamma must be > 0");
  if (!rho.moment_finite(-gamma))
    throw std::domain_error("check_ibp inapplicable: m_{-gamma} is infinite");
  IbpReport rep;
  rep.gamma = gamma;
  rep.b = 0.5 * rho.moment(-gamma).value;
  for (double lam : lam_grid) {
    if (!(lam > 0.0)) continue;
    const double cum = rho.cumulative_mass(lam);
    const double bound = rep.b * std::pow(lam, gamma);
    const double ratio = (bound > 0.0) ? cum / bound : ((cum > 0.0) ? kInf : 0.0);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.arg_max = lam;
    }
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-12;
  return rep;
}

std::pair<SpectralMeasure, double> rescale_to_pi(const SpectralMeasure& rho) {
  if (rho.domain != Domain::ContinuousTime)
    throw std::domain_error("rescale_to_pi: continuous-time measures only");
  const double smax = rho.support_max();
  if (smax == kInf)
    throw std::domain_error("rescale_to_pi: unbounded support, rescaling undefined");
  if (!rho.multipliers.empty())
    throw std::domain_error("rescale_to_pi: measure carries calculus multipliers");
  const double q = std::max(1.0, smax / kPi);
  if (q == 1.0) return {rho, 1.0};
  SpectralMeasure out = rho;
  for (auto& at : out.atoms) at.freq /= q;
  for (auto& seg : out.segments) {
    seg.a /= q;
    seg.b /= q;
    switch (seg.form) {
      case SegmentForm::Constant: seg.c *= q; break;
      case SegmentForm::Power: seg.c *= std::pow(q, 1.0 + seg.alpha); break;
      case SegmentForm::PowerTail: seg.c *= std::pow(q, 1.0 - seg.alpha); break;
      case SegmentForm::ExpWell:
      case SegmentForm::LogTail:
        throw std::domain_error("rescale_to_pi: form not closed under rescaling");
    }
  }
  if (out.ac_floor) {
    out.ac_floor->lo /= q;
    out.ac_floor->hi /= q;
    out.ac_floor->nu *= q;
  }
  // pushforward sanity: m_gamma scales by q^-gamma
  for (double g : {-2.0, 2.0}) {
    if (!rho.moment_finite(g)) continue;
    const double before = rho.moment(g).value;
    const double after = out.moment(g).value;
    const double expect = before * std::pow(q, -g);
    if (std::abs(after - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw std::runtime_error("rescale_to_pi: moment scaling law violated");
  }
  return {out, q};
}

double finite_tau(const SpectralMeasure& rho, int k_max) {
  if (k_max < 1) throw std::invalid_argument("finite_tau: k_max must be >= 1");
  double tau = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    if (!rho.moment_finite(-2.0 * k))
      throw std::domain_error("finite_tau inapplicable: m_{-2k} infinite at k=" +
                              std::to_string(k));
    const double num = rho.moment(-2.0 * k + 2.0).value;
    const double den = rho.moment(-2.0 * k).value;
    tau = std::max(tau, num / den);
  }
  return tau;
}

RieszReport riesz_lattice_gap(const SpectralMeasure& rho, double j_lo, double j_hi,
                              double nu, int n) {
  if (!(j_hi > j_lo)) throw std::invalid_argument("riesz_lattice_gap: empty interval");
  if (n < 1 || n > 2000) throw std::invalid_argument("riesz_lattice_gap: n out of range");
  RieszReport rep;
  rep.lattice_step = 2.0 * kPi / (j_hi - j_lo);
  Eigen::MatrixXd sigma(n, n);
  std::vector<double> row(n);
  for (int d = 0; d < n; ++d) row[d] = rho.covariance(rep.lattice_step * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sigma(i, j) = row[std::abs(i - j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  rep.lambda_min = es.eigenvalues().minCoeff();
  rep.decomposition_ok = rep.lambda_min > 1e-10;
  rep.B = rep.decomposition_ok ? std::sqrt(rep.lambda_min) : 0.0;
  rep.floor_flag = rep.lambda_min < nu * (j_hi - j_lo) - 1e-9;
  return rep;
}

}  // namespace gsp
