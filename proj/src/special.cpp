#include "gsp/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gsp {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

// log(Phi-bar(x)) for large positive x via the asymptotic series
// Phi-bar(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
double log_ccdf_tail(double x) {
  const double x2 = x * x;
  double term = 1.0, series = 1.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    if (std::abs(term) >= prev) break;  // series turned; stop at optimal truncation
    prev = std::abs(term);
    series += term;
  }
  return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log(series);
}
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double log_normal_ccdf(double x) {
  if (x < 30.0) {
    const double c = normal_ccdf(x);
    if (c > 0.0) return std::log(c);
  }
  return log_ccdf_tail(x);
}

double log_normal_cdf(double x) { return log_normal_ccdf(-x); }

double normal_ball(double x) { return std::erf(x / kSqrt2); }

double log_normal_ball(double x) {
  if (x > 1e-8) return std::log(std::erf(x / kSqrt2));
  // erf(y) ~ 2y/sqrt(pi) * (1 - y^2/3)
  const double y = x / kSqrt2;
  return std::log(2.0 / std::sqrt(M_PI)) + std::log(y) + std::log1p(-y * y / 3.0);
}

// Wichura's algorithm AS241 (PPND16).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = (a > b) ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace gsp
