#pragma once

// Reference values computed without the library's own algorithms.

#include <complex>
#include <vector>

namespace conelab::oracle {

using Complex = std::complex<double>;

// J_m(x) by its power series (integer order, moderate x).
double bessel_j(int m, double x);
// k-th positive zero of J_m, bracketed on a fine grid and bisected.
double bessel_zero(int m, int k);

// dim of degree-l spherical harmonics on S^d, counted from monomials in d+1 variables.
long harmonic_count(int d, int l);

// Eigenvalues of the boundary Laplacian used by the presets: -l(l+d-1), or -k^2 on the circle.
double sphere_eigenvalue(int d, int l);

// q_j^{+-} = (n-1)/2 +- sqrt(((n-1)/2)^2 - lambda)
std::pair<Complex, Complex> laplace_roots(int n, double lambda);

// 1/(z^2 - (n-1) z + lambda) through the partial fraction split.
Complex laplace_inverse_partial_fractions(int n, double lambda, Complex z);

// Single-mode heat bound (1 + (1 - e^{-mu T})) for u' + mu u = f.
double heat_single_mode_bound(double mu, double T);

// Resolvent norm of a nonnegative selfadjoint operator with ground state mu at a point of the negative axis.
double selfadjoint_resolvent_norm(double mu, double r);

// Least squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace conelab::oracle
