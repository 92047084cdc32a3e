#include "oracles.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace conelab::oracle {

double bessel_j(int m, double x) {
    const double half = 0.5 * x;
    double term = std::pow(half, m) / std::tgamma(m + 1.0);
    double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= -half * half / (k * double(k + m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && k > half) break;
    }
    return sum;
}

double bessel_zero(int m, int k) {
    const double step = 1e-2;
    int found = 0;
    double a = step, fa = bessel_j(m, a);
    for (double b = 2 * step; b < 60.0; b += step) {
        const double fb = bessel_j(m, b);
        if (fa == 0.0 || fa * fb < 0.0) {
            if (++found == k) {
                double lo = a, hi = b;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (bessel_j(m, lo) * bessel_j(m, mid) <= 0.0) hi = mid;
                    else lo = mid;
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("bessel zero not bracketed");
}

namespace {

long monomials(int vars, int degree) {
    if (degree < 0) return 0;
    if (vars == 1) return 1;
    long count = 0;
    for (int e = 0; e <= degree; ++e) count += monomials(vars - 1, degree - e);
    return count;
}

}  // namespace

long harmonic_count(int d, int l) { return monomials(d + 1, l) - monomials(d + 1, l - 2); }

double sphere_eigenvalue(int d, int l) { return -double(l) * (l + d - 1); }

std::pair<Complex, Complex> laplace_roots(int n, double lambda) {
    const double c = 0.5 * (n - 1);
    const Complex nu = std::sqrt(Complex(c * c - lambda));
    return {c + nu, c - nu};
}

Complex laplace_inverse_partial_fractions(int n, double lambda, Complex z) {
    const auto [qp, qm] = laplace_roots(n, lambda);
    if (std::abs(qp - qm) == 0.0) return 1.0 / ((z - qp) * (z - qp));
    return (1.0 / (z - qp) - 1.0 / (z - qm)) / (qp - qm);
}

double heat_single_mode_bound(double mu, double T) { return 1.0 + (1.0 - std::exp(-mu * T)); }

double selfadjoint_resolvent_norm(double mu, double r) { return 1.0 / (r + mu); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace conelab::oracle
