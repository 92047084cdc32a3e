#include "conelab/meromorphic.hpp"

#include <algorithm>
#include <cmath>

namespace conelab {

namespace {

// First `count` Taylor coefficients of num/den around 0, given as polynomials
// already shifted to the expansion point.
template <class T>
std::vector<T> series_quotient(const Polynomial<T>& num, const Polynomial<T>& den, int count) {
    std::vector<T> out(static_cast<std::size_t>(count), T(0));
    const T d0 = den.coeff(0);
    for (int k = 0; k < count; ++k) {
        T acc = num.coeff(static_cast<std::size_t>(k));
        for (int i = 1; i <= k; ++i) acc -= den.coeff(static_cast<std::size_t>(i)) * out[static_cast<std::size_t>(k - i)];
        out[static_cast<std::size_t>(k)] = acc / d0;
    }
    return out;
}

double poly_scale(const ComplexPoly& p) {
    double s = 0.0;
    for (const auto& c : p.coeffs()) s += std::abs(c);
    return s;
}

}  // namespace

std::vector<RootCluster> exact_roots(const RationalPoly& p) {
    std::vector<RootCluster> out;
    for (const auto& [factor, mult] : square_free_factors(p)) {
        for (const Complex& r : polynomial_roots(to_complex(factor))) {
            RootCluster c{r, std::nullopt, mult};
            if (std::abs(r.imag()) < 1e-7 * std::max(1.0, std::abs(r))) {
                if (auto q = rationalize(r.real(), 1L << 20, 1e-7 * std::max(1.0, std::abs(r.real())))) {
                    if (factor(*q) == 0) {
                        c.exact = *q;
                        c.value = to_complex(*q);
                    }
                }
            }
            out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

std::vector<RootCluster> clustered_roots(const ComplexPoly& p, double cluster_tol) {
    std::vector<Complex> roots = polynomial_roots(p);
    std::vector<std::vector<Complex>> groups;
    for (const Complex& r : roots) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const std::vector<Complex>& g) {
            return std::any_of(g.begin(), g.end(), [&](const Complex& x) { return std::abs(x - r) < cluster_tol; });
        });
        if (it == groups.end()) groups.push_back({r});
        else it->push_back(r);
    }
    auto centre = [](const std::vector<Complex>& g) {
        Complex c = 0.0;
        for (const auto& x : g) c += x;
        return c / double(g.size());
    };

    // A k-fold root splits by about eps^{1/k} under rounding. Merge nearby
    // groups when the merged centre annihilates the lower derivatives.
    const double scale = poly_scale(p);
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < groups.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < groups.size() && !merged; ++b) {
                const Complex ca = centre(groups[a]);
                const Complex cb = centre(groups[b]);
                const double r = std::max(1.0, std::abs(ca));
                if (std::abs(ca - cb) > 1e-4 * r) continue;
                std::vector<Complex> g = groups[a];
                g.insert(g.end(), groups[b].begin(), groups[b].end());
                const Complex c = centre(g);
                ComplexPoly d = p;
                double fact = 1.0;
                bool ok = true;
                for (std::size_t j = 0; j < g.size() && ok; ++j) {
                    if (j > 0) fact *= double(j);
                    ok = std::abs(d(c)) / fact <= 1e-8 * scale * std::pow(r, p.degree());
                    d = d.derivative();
                }
                if (ok) {
                    groups[a] = std::move(g);
                    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
                    merged = true;
                }
            }
        }
    }
    std::vector<RootCluster> cl;
    for (const auto& g : groups) cl.push_back({centre(g), std::nullopt, static_cast<int>(g.size())});
    std::sort(cl.begin(), cl.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return cl;
}

ModeMeromorphic ModeMeromorphic::from_exact(std::size_t mode, RationalFunctionQ f) {
    ModeMeromorphic m;
    m.mode_ = mode;
    m.numeric_ = to_complex(f);
    const RationalPoly& num = f.num();
    const RationalPoly& den = f.den();
    m.polynomial_part_ = to_complex(num.divmod(den).first);
    m.scalar_ = to_complex(num.leading());

    auto droots = exact_roots(den);
    for (const auto& r : droots) {
        Pole pole;
        pole.value = r.value;
        pole.exact = r.exact;
        pole.order = r.multiplicity;
        if (r.exact) {
            RationalPoly lin = RationalPoly::linear_root(*r.exact);
            RationalPoly rest = den.divmod(lin.pow(static_cast<unsigned>(r.multiplicity))).first;
            auto h = series_quotient(num.shifted(*r.exact), rest.shifted(*r.exact), r.multiplicity);
            for (int k = 0; k < r.multiplicity; ++k) {
                pole.laurent_exact.push_back(h[static_cast<std::size_t>(r.multiplicity - 1 - k)]);
                pole.laurent.push_back(to_complex(pole.laurent_exact.back()));
            }
        } else {
            ComplexPoly rest_s = ComplexPoly::constant(Complex(1.0));
            for (const auto& o : droots) {
                if (&o == &r) continue;
                ComplexPoly lin({r.value - o.value, Complex(1.0)});
                rest_s = rest_s * lin.pow(static_cast<unsigned>(o.multiplicity));
            }
            auto h = series_quotient(to_complex(num).shifted(r.value), rest_s, r.multiplicity);
            for (int k = 0; k < r.multiplicity; ++k) pole.laurent.push_back(h[static_cast<std::size_t>(r.multiplicity - 1 - k)]);
        }
        m.poles_.push_back(std::move(pole));
    }
    for (const auto& r : exact_roots(num)) m.zeros_.push_back({r.value, r.exact, r.multiplicity});
    m.exact_ = std::move(f);
    return m;
}

ModeMeromorphic ModeMeromorphic::from_numeric(std::size_t mode, RationalFunctionC f, double cluster_tol) {
    ModeMeromorphic m;
    m.mode_ = mode;
    m.numeric_ = std::move(f);
    m.finish_numeric();
    const ComplexPoly& num = m.numeric_.num();
    const ComplexPoly& den = m.numeric_.den();
    auto droots = clustered_roots(den, cluster_tol);
    const double fscale = poly_scale(num) / std::max(poly_scale(den), 1e-300);
    for (const auto& r : droots) {
        ComplexPoly rest_s = ComplexPoly::constant(den.leading());
        for (const auto& o : droots) {
            if (&o == &r) continue;
            ComplexPoly lin({r.value - o.value, Complex(1.0)});
            rest_s = rest_s * lin.pow(static_cast<unsigned>(o.multiplicity));
        }
        auto h = series_quotient(num.shifted(r.value), rest_s, r.multiplicity);
        Pole pole;
        pole.value = r.value;
        pole.order = r.multiplicity;
        for (int k = 0; k < r.multiplicity; ++k) pole.laurent.push_back(h[static_cast<std::size_t>(r.multiplicity - 1 - k)]);
        double rmax = 0.0;
        for (const auto& c : pole.laurent) rmax = std::max(rmax, std::abs(c));
        // numerator sharing the root lowers the order
        while (!pole.laurent.empty() && std::abs(pole.laurent.back()) <= 1e-10 * (fscale + rmax)) pole.laurent.pop_back();
        pole.order = static_cast<int>(pole.laurent.size());
        if (pole.order > 0) m.poles_.push_back(std::move(pole));
    }
    for (const auto& r : clustered_roots(num, cluster_tol)) m.zeros_.push_back({r.value, std::nullopt, r.multiplicity});
    return m;
}

void ModeMeromorphic::finish_numeric() {
    polynomial_part_ = numeric_.num().divmod(numeric_.den()).first;
    scalar_ = numeric_.num().leading();
}

Complex ModeMeromorphic::principal_part(Complex z) const {
    Complex acc = 0.0;
    for (const auto& p : poles_) {
        const Complex w = 1.0 / (z - p.value);
        Complex wk = w;
        for (const auto& r : p.laurent) {
            acc += r * wk;
            wk *= w;
        }
    }
    return acc;
}

ModeMeromorphic ModeMeromorphic::shifted(const Rational& sigma) const {
    if (exact_) return from_exact(mode_, exact_->shifted(sigma));
    return shifted(to_complex(sigma));
}

ModeMeromorphic ModeMeromorphic::shifted(Complex sigma) const {
    ModeMeromorphic m = *this;
    m.exact_.reset();
    m.numeric_ = numeric_.shifted(sigma);
    m.finish_numeric();
    for (auto& p : m.poles_) {
        p.value -= sigma;
        p.exact.reset();
        p.laurent_exact.clear();
    }
    for (auto& z : m.zeros_) {
        z.value -= sigma;
        z.exact.reset();
    }
    return m;
}

}  // namespace conelab
