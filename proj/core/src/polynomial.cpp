#include "conelab/polynomial.hpp"

#include <Eigen/Eigenvalues>

namespace conelab {

ComplexPoly to_complex(const RationalPoly& p) {
    std::vector<Complex> c;
    c.reserve(p.coeffs().size());
    for (const auto& v : p.coeffs()) c.push_back(to_complex(v));
    return ComplexPoly(std::move(c));
}

RationalFunctionC to_complex(const RationalFunctionQ& f) {
    return RationalFunctionC(to_complex(f.num()), to_complex(f.den()));
}

RationalPoly gcd(RationalPoly a, RationalPoly b) {
    while (!b.is_zero()) {
        RationalPoly r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

std::vector<std::pair<RationalPoly, int>> square_free_factors(const RationalPoly& p) {
    // Yun's algorithm
    std::vector<std::pair<RationalPoly, int>> out;
    if (p.degree() < 1) return out;
    RationalPoly f = p.monic();
    RationalPoly df = f.derivative();
    RationalPoly a = gcd(f, df);
    RationalPoly b = f.divmod(a).first;
    RationalPoly c = df.divmod(a).first;
    RationalPoly d = c - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        RationalPoly g = gcd(b, d);
        if (g.degree() > 0) out.emplace_back(g, i);
        b = b.divmod(g).first;
        c = d.divmod(g).first;
        d = c - b.derivative();
        ++i;
    }
    return out;
}

std::vector<Complex> polynomial_roots(const ComplexPoly& p) {
    const int n = p.degree();
    std::vector<Complex> roots;
    if (n < 1) return roots;
    if (n == 1) {
        roots.push_back(-p.coeff(0) / p.coeff(1));
        return roots;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    const Complex lc = p.leading();
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.coeff(static_cast<std::size_t>(i)) / lc;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    const ComplexPoly dp = p.derivative();
    for (int i = 0; i < n; ++i) {
        Complex z = es.eigenvalues()[i];
        Complex d = dp(z);
        if (std::abs(d) > 0.0) {
            Complex step = p(z) / d;
            // reject a polish step that makes things worse (clustered roots)
            Complex z1 = z - step;
            if (std::abs(p(z1)) <= std::abs(p(z))) z = z1;
        }
        roots.push_back(z);
    }
    return roots;
}

}  // namespace conelab
