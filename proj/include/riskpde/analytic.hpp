#pragma once

// Exact recovery probability for the scalar benchmark dX = lambda dt + dW
// with barrier at x = 2: the probability that X reaches 2 by time T from
// x < 2. Two independent routes are provided so each can serve as the
// other's oracle:
//   closed_form_recovery  - first-passage CDF of drifted Brownian motion,
//                           Phi((lambda T - a)/sqrt(T)) + e^{2 lambda a} Phi(-(lambda T + a)/sqrt(T)),
//                           a = 2 - x, evaluated in log space where needed
//   analytic_recovery     - adaptive quadrature of the first-passage density
//                           a / sqrt(2 pi t^3) exp(-(a - lambda t)^2 / (2 t))
// Both return 1 for x >= 2 (already at or past the barrier) and 0 for T = 0
// with x < 2.

#include "riskpde/grid.hpp"

namespace riskpde {

double closed_form_recovery(double x, double horizon, double lambda);
double analytic_recovery(double x, double horizon, double lambda);

// d/dx of closed_form_recovery (x < 2, horizon > 0).
double closed_form_gradient(double x, double horizon, double lambda);

// Standard normal CDF via erfc; relative error below 1e-10 over the reals.
double norm_cdf(double z);
// log Phi(-z), stable for large positive z.
double log_norm_cdf_neg(double z);

ProbabilityField analytic_field(const GridSpec&, double lambda);
GradientField analytic_gradient_field(const GridSpec&, double lambda);

} // namespace riskpde
