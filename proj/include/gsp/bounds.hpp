#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsp/persistence.hpp"
#include "gsp/spectral_measure.hpp"

namespace gsp {

struct UniversalConstants {
  double c0 = 1.0;       // alpha = c0 |E|
  double c1 = 1.0;       // beta = (c1 k)^-k sqrt(nu|E|/m_{-2k}) for k > 0
  double c_s = 1.0;      // beta = c_s sqrt(nu|E|/m_{-s}) for k = 0
  double k_dudley = 1.0;
};

struct BoundParams {
  // lower bound: over Z these are exact (beta = 2*sqrt(2), ell0 = 0); over R the
  // pair is non-explicit in closed form and must be user-supplied (heuristic).
  std::optional<double> beta_lower;
  std::optional<double> ell0_lower;

  // upper bound
  std::optional<int> k;    // pinned k; otherwise the optimizer scans 0..k_of_N
  double s = 0.0;          // gamma = 2k + s, 0 <= s < 2
  UniversalConstants constants;
  std::optional<AcFloor> ac_floor;  // overrides the measure's declared floor
  std::optional<double> q;          // scale factor; default max(1, support/pi)
};

struct BoundFactors {
  double tail_term = 0.0;  // lower: log CCDF(ell/sigma_N); upper: log CCDF(ell N^r)
  double ball_term = 0.0;  // lower: N log P(beta|Z|<ell); upper: log(2qN)+alpha N log P(...)
};

struct BoundResult {
  double log_bound = 0.0;
  double ell_star = 0.0;
  BoundFactors factors;
  int k_used = 0;
  double s_used = 0.0;
  double beta_used = 0.0;
  double alpha_used = 0.0;
  double ell0 = 0.0;
  std::vector<std::string> flags;  // "heuristic", "up to universal constants", ...
};

BoundResult lower_bound_log(const SpectralMeasure& rho, double N, double ell,
                            const BoundParams& params = {});
BoundResult optimize_lower(const SpectralMeasure& rho, double N,
                           const BoundParams& params = {});

BoundResult upper_bound_log(const SpectralMeasure& rho, double N, double ell,
                            const BoundParams& params);
BoundResult optimize_upper(const SpectralMeasure& rho, double N,
                           const BoundParams& params);

// max{k in N, k <= N : k * m_{-2k}^{1/k} <= N}, 0 if none; analytic divergence cutoff.
int k_of_N(const SpectralMeasure& rho, double N);

// ---- asymptotic regime classification --------------------------------------

enum class RegimeKind { PowerLog, Linear, NLogN, Quadratic, ExpExp };
enum class RegimeSide { Lower, Upper, Both };

struct RegimeClass {
  RegimeKind kind = RegimeKind::Linear;
  RegimeSide side = RegimeSide::Both;
  double exponent = 0.0;  // PowerLog: -N^exponent * log N
  std::string conditions;
};

struct RegimeFeatures {
  enum class Origin { PowerAlpha, Gap, ExpWell } origin = Origin::PowerAlpha;
  double alpha = 0.0;      // density ~ lambda^alpha at 0 (PowerAlpha)
  double expwell_A = 1.0;  // ExpWell parameter
  enum class Tail { Compact, Power, Log } tail = Tail::Compact;
  double tail_alpha = 0.0;  // Power tail decay exponent
};

std::vector<RegimeClass> envelope(const RegimeFeatures& features, Domain domain);

// ---- empirical slope extraction ---------------------------------------------

enum class SlopeModel { PowerOfN, PowerTimesLog };

struct SlopeFit {
  double exponent = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

SlopeFit slope_fit(const std::vector<CurvePoint>& curve, SlopeModel model,
                   const RngSpec& rng = {12345, 1}, int bootstrap = 200);

}  // namespace gsp
