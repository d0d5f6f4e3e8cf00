#pragma once
#include <cstddef>

namespace brw {

// Laplace transform of the limit law of S_n/n^2 given survival:
// E[e^{-theta v}] = x csch x at x = sqrt(2 sigma^2 theta).
long double pakes_transform(long double theta, long double sigma2);

// Upper tail 1 - F(gamma), by Euler-accelerated Bromwich inversion of
// (1 - phi(s))/s.  err_est (optional out) is the self-reported accuracy;
// throws if the acceleration fails to reach 1e-6.
double pakes_tail(double gamma, double sigma2, double* err_est = nullptr);

// Moments of the limit law by quadrature of the tail:
//   mean        = integral of tail         = sigma^2/3
//   second mom. = integral of 2 gamma tail = 7 sigma^4/45
double pakes_mean(double sigma2);
double pakes_second_moment(double sigma2);

// integral of e^{-theta v} dF via the tail (re-transform consistency check):
// E[e^{-theta v}] = 1 - theta * integral e^{-theta g} tail(g) dg
double pakes_retransform(double theta, double sigma2);

// bound on P(X <= E[X]/2) for X a finite sum of independent Bernoullis
double chernoff_rhs(double ex);

} // namespace brw
