#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsp {

enum class Domain { IntegerTime, ContinuousTime };

enum class SegmentForm { Constant, Power, ExpWell, PowerTail, LogTail };

// Symmetric finite measures are stored one-sided: an atom at freq > 0 carries the
// combined mass of the +-freq pair (split equally by symmetry); an atom at 0
// carries its full mass. Segment densities are the symmetric density values on
// [a,b] (mirrored to negative frequencies), so full-line integrals double them.
struct Atom {
  double freq = 0.0;
  double mass = 0.0;
};

struct DensitySegment {
  double a = 0.0;
  double b = 0.0;  // +inf allowed for ContinuousTime tails
  SegmentForm form = SegmentForm::Constant;
  double c = 1.0;      // scale > 0
  double alpha = 0.0;  // Power: c*lam^alpha ; PowerTail: c*lam^-alpha
  double A = 1.0;      // ExpWell: c*exp(-lam^-A)

  double density(double lam) const;
  bool unbounded() const { return b == std::numeric_limits<double>::infinity(); }
};

// |lambda|^p and discrete-derivative factors carried exactly through every
// integral; this is how the derivative / anti-derivative measures are realized.
struct Multiplier {
  enum Kind { PowerLaw, OneMinusCos, InvOneMinusCos };
  Kind kind = PowerLaw;
  double p = 0.0;  // PowerLaw exponent
};

struct AcFloor {
  double lo = 0.0;  // one-sided interval [lo,hi] on which density >= nu, mirrored
  double hi = 0.0;
  double nu = 0.0;
};

struct MomentEntry {
  double value = 0.0;
  bool infinite = false;
  double error = 0.0;  // quadrature error estimate (0 for closed forms)
};
using MomentTable = std::map<double, MomentEntry>;

struct CovValue {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

struct IbpReport {
  double gamma = 0.0;
  double b = 0.0;  // = m_{-gamma}/2
  double max_ratio = 0.0;
  double arg_max = 0.0;
  bool pass = false;
};

struct RieszReport {
  double lattice_step = 0.0;
  double lambda_min = 0.0;
  double B = 0.0;  // sqrt(lambda_min) when positive
  bool decomposition_ok = false;
  bool floor_flag = false;  // lambda_min fell below the nu*|J| expectation
};

class SpectralMeasure {
 public:
  Domain domain = Domain::IntegerTime;
  std::vector<Atom> atoms;
  std::vector<DensitySegment> segments;
  std::vector<Multiplier> multipliers;
  double declared_delta = 1.0;  // delta with m_delta < inf; 0 means "none available"
  std::optional<AcFloor> ac_floor;

  // Structural invariants; throws std::invalid_argument naming the offender.
  void validate() const;

  double total_mass() const;
  SpectralMeasure normalized() const;

  // m_delta; divergence is decided analytically from the segment forms, never
  // from quadrature overflow.
  MomentEntry moment(double delta) const;
  bool moment_finite(double delta) const;

  // rho([0, 1/N]): atom at 0 in full, atoms in (0,1/N] at half the pair mass.
  double sigma_sq(double N) const;
  double cumulative_mass(double hi) const;

  double covariance(double t) const;
  CovValue covariance_detail(double t) const;

  // sup{delta > 0 : m_delta < inf} (inf for bounded support, 0 if none).
  double sup_finite_positive_moment() const;

  double support_max() const;  // inf for unbounded tails
  bool has_atom_at_zero() const;
  double weight_at(double lam) const;  // product of multipliers (may be 0 or inf)

  std::string digest() const;  // stable content hash of the canonical form
};

IbpReport check_ibp(const SpectralMeasure& rho, double gamma,
                    const std::vector<double>& lam_grid);

std::pair<SpectralMeasure, double> rescale_to_pi(const SpectralMeasure& rho);

double finite_tau(const SpectralMeasure& rho, int k_max);

RieszReport riesz_lattice_gap(const SpectralMeasure& rho, double j_lo, double j_hi,
                              double nu, int n);

}  // namespace gsp
