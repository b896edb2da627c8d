#pragma once

namespace gsp {

// Standard normal distribution helpers. cdf/ccdf have relative error <= ~1e-15
// in the body (they defer to erfc); the log variants stay accurate far into the
// tail where the linear-scale values underflow.
double normal_cdf(double x);
double normal_ccdf(double x);
double normal_pdf(double x);
double log_normal_cdf(double x);
double log_normal_ccdf(double x);

// P(|Z| <= x) = erf(x/sqrt(2)); log variant stable for small x.
double normal_ball(double x);
double log_normal_ball(double x);

// Inverse of normal_cdf (Wichura AS241, ~1e-15 relative); p in (0,1).
double normal_quantile(double p);

// log(exp(a) + exp(b)) without overflow; handles -inf.
double log_sum_exp(double a, double b);

double sinc(double x);  // sin(x)/x, 1 at 0

}  // namespace gsp
