#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsp/orthant.hpp"
#include "gsp/rng.hpp"
#include "gsp/spectral_measure.hpp"

namespace gsp {

enum class EstimateMethod { ExactSmall, OrthantMC, PathMC };

struct PersistenceEstimate {
  double log_p = 0.0;  // natural log, <= 0 (or -inf)
  double se_log = 0.0; // MC standard error; quadrature bound for ExactSmall
  EstimateMethod method = EstimateMethod::OrthantMC;
  long n_samples = 0;
  double grid_step = 0.0;  // 0 marks integer time
  bool low_confidence = false;
};

struct CurvePoint {
  double N = 0.0;
  PersistenceEstimate estimate;
  bool failed = false;  // gap marker: estimation threw, curve continues
  std::string error;
};

struct PersistenceOptions {
  EstimateMethod method = EstimateMethod::OrthantMC;
  int orthant_dim_cap = 512;   // config override, not a hard constant
  int exact_small_max = 7;     // ExactSmall used automatically up to this dim
  bool parallel = true;
};

// P(f > 0 on (0,N] over Z): constraint points 1..N, covariance lags 0..N-1.
PersistenceEstimate persistence_integer(const SpectralMeasure& rho, int N,
                                        long n_samples, const RngSpec& rng,
                                        const PersistenceOptions& opts = {});

// Grid restriction {h, 2h, ...} of (0,N] over R; upward-biased vs the continuum.
PersistenceEstimate persistence_continuous(const SpectralMeasure& rho, double N,
                                           double h, long n_samples, const RngSpec& rng,
                                           const PersistenceOptions& opts = {});

std::vector<CurvePoint> persistence_curve(const SpectralMeasure& rho,
                                          const std::vector<double>& N_list,
                                          long n_samples, const RngSpec& rng,
                                          const PersistenceOptions& opts = {},
                                          double h = 0.0);

struct RefinementRow {
  double h = 0.0;
  PersistenceEstimate estimate;
};

struct RefinementStudy {
  std::vector<RefinementRow> rows;
  bool extrapolated = false;
  double log_p_extrapolated = 0.0;
  double slope = 0.0;  // d(log_p)/dh from the two finest steps
};

RefinementStudy grid_refinement_study(const SpectralMeasure& rho, double N,
                                      const std::vector<double>& h_list, long n_samples,
                                      const RngSpec& rng,
                                      const PersistenceOptions& opts = {});

std::string curve_to_csv(const std::vector<CurvePoint>& curve, EstimateMethod method,
                         std::uint64_t seed);

}  // namespace gsp
