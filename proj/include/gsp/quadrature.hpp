#pragma once

#include <functional>

namespace gsp {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // estimated absolute error bound
  long evals = 0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7-15 on [a,b] to absolute tolerance. Evaluation budget
// is capped; on cap the result carries the attached error bound, converged=false.
QuadResult integrate(const Integrand& f, double a, double b, double abs_tol,
                     long max_evals = 1000000);

// Integral over [a, inf) via the rational map t = a + s/(1-s).
QuadResult integrate_to_inf(const Integrand& f, double a, double abs_tol,
                            long max_evals = 1000000);

// Integral over [a, inf) of a damped oscillatory integrand: sums panels of the
// given length until panel contributions settle; the remainder bound comes from
// the last panel magnitude (valid once contributions alternate/decay).
QuadResult integrate_oscillatory_tail(const Integrand& f, double a, double panel,
                                      double abs_tol, long max_panels = 100000);

}  // namespace gsp
