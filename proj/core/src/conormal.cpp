#include "conelab/conormal.hpp"
#include "conelab/error.hpp"
#include "conelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace conelab {

namespace {

Complex eval_lambda(const RationalPoly& p, const BoundaryMode& m) {
    if (m.exact) return to_complex(p(*m.exact));
    return to_complex(p)(Complex(m.eigenvalue, 0.0));
}

}  // namespace

ConeOperator::ConeOperator(int mu, int n, std::vector<std::vector<CoefficientTerm>> coeffs, std::string name,
                           std::string interior)
    : mu_(mu), n_(n), coeffs_(std::move(coeffs)), name_(std::move(name)), interior_(std::move(interior)) {
    if (mu_ < 1) throw Error(ErrorCode::InvalidInput, "conormal", "operator order must be positive");
    if (n_ < 0) throw Error(ErrorCode::InvalidInput, "conormal", "boundary dimension must be non-negative");
    if (coeffs_.size() != static_cast<std::size_t>(mu_ + 1)) {
        throw Error(ErrorCode::InvalidInput, "conormal", "expected mu+1 coefficient families");
    }
    for (const auto& c : coeffs_)
        for (const auto& term : c)
            if (term.t_power < 0) throw Error(ErrorCode::InvalidInput, "conormal", "negative power of t");
    RationalPoly top = taylor_coefficient(mu_, 0);
    if (top.degree() != 0) {
        throw Error(ErrorCode::InvalidInput, "conormal", "top coefficient at t=0 must be a nonzero scalar");
    }
}

ConeOperator ConeOperator::laplacian(int n) {
    std::vector<std::vector<CoefficientTerm>> c(3);
    c[0] = {{0, RationalPoly({Rational(0), Rational(1)})}};
    c[1] = {{0, RationalPoly::constant(Rational(-(n - 1)))}};
    c[2] = {{0, RationalPoly::constant(Rational(1))}};
    return ConeOperator(2, n, std::move(c), "laplacian");
}

ConeOperator ConeOperator::example_abcd() {
    std::vector<std::vector<CoefficientTerm>> c(3);
    c[0] = {{0, RationalPoly({Rational(0), Rational(1)})}};
    c[1] = {{1, RationalPoly::constant(Rational(1, 4))}};
    c[2] = {{0, RationalPoly::constant(Rational(1, 4))}};
    return ConeOperator(2, 1, std::move(c), "example-abcd");
}

RationalPoly ConeOperator::taylor_coefficient(int j, int l) const {
    RationalPoly acc;
    for (const auto& term : coefficient(j))
        if (term.t_power == l) acc = acc + term.lambda_poly;
    return acc;
}

int ConeOperator::t_degree(int j) const {
    int d = -1;
    for (const auto& term : coefficient(j))
        if (!term.lambda_poly.is_zero()) d = std::max(d, term.t_power);
    return d;
}

bool ConeOperator::constant_coefficients() const {
    for (int j = 0; j <= mu_; ++j)
        if (t_degree(j) > 0) return false;
    return true;
}

std::optional<Rational> ConeOperator::laplacian_scale() const {
    if (mu_ != 2 || !constant_coefficients()) return std::nullopt;
    RationalPoly a2 = taylor_coefficient(2, 0);
    if (a2.degree() != 0) return std::nullopt;
    Rational c = a2.leading();
    if (c <= 0) return std::nullopt;
    const ConeOperator ref = laplacian(n_);
    for (int j = 0; j <= 2; ++j)
        if (!(taylor_coefficient(j, 0) == ref.taylor_coefficient(j, 0) * c)) return std::nullopt;
    return c;
}

ConeOperator ConeOperator::scaled(const Rational& c) const {
    auto coeffs = coeffs_;
    for (auto& fam : coeffs)
        for (auto& term : fam) term.lambda_poly = term.lambda_poly * c;
    return ConeOperator(mu_, n_, std::move(coeffs), name_ + "*" + to_string(c), interior_);
}

ConormalSymbol conormal_symbol(const ConeOperator& A, const BoundarySpectrum& S) {
    if (A.n() != S.dim_boundary()) {
        throw Error(ErrorCode::DimensionMismatch, "conormal",
                    "operator has n=" + std::to_string(A.n()) + " but spectrum has dim_boundary=" +
                        std::to_string(S.dim_boundary()));
    }
    ConormalSymbol sigma;
    sigma.n = A.n();
    sigma.mu = A.mu();
    for (std::size_t m = 0; m < S.size(); ++m) {
        const auto& mode = S.mode(m);
        ModePolynomial mp;
        mp.mode = m;
        if (mode.exact) {
            std::vector<Rational> c;
            for (int j = 0; j <= A.mu(); ++j) c.push_back(A.taylor_coefficient(j, 0)(*mode.exact));
            mp.exact = RationalPoly(std::move(c));
            mp.numeric = to_complex(*mp.exact);
        } else {
            std::vector<Complex> c;
            for (int j = 0; j <= A.mu(); ++j) c.push_back(eval_lambda(A.taylor_coefficient(j, 0), mode));
            mp.numeric = ComplexPoly(std::move(c));
        }
        sigma.modes.push_back(std::move(mp));
    }
    return sigma;
}

namespace {

Complex symbol_value(const ConeOperator& A, double xi2, double tau, double t) {
    Complex acc = 0.0;
    for (int j = 0; j <= A.mu(); ++j) {
        const int order = A.mu() - j;
        for (const auto& term : A.coefficient(j)) {
            if (term.lambda_poly.is_zero()) continue;
            const int d = term.lambda_poly.degree();
            if (2 * d > order) {
                throw Error(ErrorCode::UnsupportedCoefficient, "conormal",
                            "coefficient a_" + std::to_string(j) + " has order above " + std::to_string(order));
            }
            if (2 * d < order) continue;
            const double tp = term.t_power == 0 ? 1.0 : std::pow(t, term.t_power);
            acc += to_double(term.lambda_poly.leading()) * tp * std::pow(-xi2, d) * std::pow(Complex(0.0, -tau), j);
        }
    }
    return acc;
}

}  // namespace

std::function<Complex(double, double)> rescaled_symbol(const ConeOperator& A) {
    symbol_value(A, 1.0, 1.0, 0.0);  // validates coefficient orders up front
    return [A](double xi2, double tau) { return symbol_value(A, xi2, tau, 0.0); };
}

std::function<Complex(double, double)> interior_symbol(const ConeOperator& A, double t) {
    symbol_value(A, 1.0, 1.0, t);
    return [A, t](double xi2, double tau) { return symbol_value(A, xi2, tau, t); };
}

std::vector<ModeMeromorphic> invert_conormal(const ConormalSymbol& sigma) {
    std::vector<ModeMeromorphic> out(sigma.modes.size());
    for (const auto& mp : sigma.modes) {
        if (mp.numeric.is_zero()) {
            throw Error(ErrorCode::IdenticallyZero, "conormal",
                        "conormal symbol vanishes identically on mode " + std::to_string(mp.mode));
        }
    }
    parallel_for(sigma.modes.size(), [&](std::size_t i) {
        const auto& mp = sigma.modes[i];
        if (mp.exact) {
            out[i] = ModeMeromorphic::from_exact(mp.mode, RationalFunctionQ(RationalPoly::constant(Rational(1)), *mp.exact));
        } else {
            out[i] = ModeMeromorphic::from_numeric(mp.mode, RationalFunctionC(ComplexPoly::constant(Complex(1.0)), mp.numeric));
        }
    });
    return out;
}

std::vector<NonBijectivityPoint> nonbijectivity_points(const ConormalSymbol& sigma, double a, double b) {
    std::vector<NonBijectivityPoint> out;
    if (!(a < b)) return out;
    for (const auto& mp : sigma.modes) {
        std::vector<RootCluster> roots =
            mp.exact ? exact_roots(*mp.exact) : clustered_roots(mp.numeric, ModeMeromorphic::kClusterTolerance);
        for (const auto& r : roots) {
            if (!(r.value.real() > a && r.value.real() < b)) continue;
            auto same = [&](const NonBijectivityPoint& p) {
                if (p.exact && r.exact) return *p.exact == *r.exact;
                return std::abs(p.q - r.value) < ModeMeromorphic::kClusterTolerance;
            };
            auto it = std::find_if(out.begin(), out.end(), same);
            if (it == out.end()) {
                out.push_back({r.value, r.exact, r.multiplicity, {mp.mode}});
            } else {
                it->order = std::max(it->order, r.multiplicity);
                it->modes.insert(mp.mode);
                if (!it->exact && r.exact) {
                    it->exact = r.exact;
                    it->q = r.value;
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const NonBijectivityPoint& x, const NonBijectivityPoint& y) {
        if (x.q.real() != y.q.real()) return x.q.real() < y.q.real();
        return x.q.imag() < y.q.imag();
    });
    return out;
}

SymbolSequence taylor_sequence(const ConeOperator& A, const BoundarySpectrum& S) {
    if (A.n() != S.dim_boundary()) {
        throw Error(ErrorCode::DimensionMismatch, "conormal", "operator and spectrum dimensions differ");
    }
    SymbolSequence F;
    F.kind = SequenceKind::F;
    F.terms.resize(static_cast<std::size_t>(A.mu()));
    for (int l = 0; l < A.mu(); ++l) {
        auto& row = F.terms[static_cast<std::size_t>(l)];
        row.resize(S.size());
        parallel_for(S.size(), [&](std::size_t m) {
            const auto& mode = S.mode(m);
            // the t^l coefficient of a_j is already (1/l!) d_t^l a_j(0)
            if (mode.exact) {
                std::vector<Rational> c;
                for (int j = 0; j <= A.mu(); ++j) c.push_back(A.taylor_coefficient(j, l)(*mode.exact));
                row[m] = ModeMeromorphic::from_exact(m, RationalFunctionQ::polynomial(RationalPoly(std::move(c))));
            } else {
                std::vector<Complex> c;
                for (int j = 0; j <= A.mu(); ++j) c.push_back(eval_lambda(A.taylor_coefficient(j, l), mode));
                row[m] = ModeMeromorphic::from_numeric(m, RationalFunctionC::polynomial(ComplexPoly(std::move(c))));
            }
        });
    }
    return F;
}

namespace {

template <class T>
std::vector<RationalFunction<T>> recursion(const std::vector<RationalFunction<T>>& f) {
    const std::size_t mu = f.size();
    if (f[0].is_zero()) throw Error(ErrorCode::IdenticallyZero, "conormal", "f_0 vanishes identically");
    const RationalFunction<T> f0inv = f[0].inverse();
    std::vector<RationalFunction<T>> g{f0inv};
    for (std::size_t l = 1; l < mu; ++l) {
        RationalFunction<T> sum;
        for (std::size_t j = 0; j < l; ++j) sum = sum + f[l - j].shifted(T(-static_cast<long>(j))) * g[j];
        g.push_back(-(f0inv.shifted(T(-static_cast<long>(l))) * sum));
    }
    return g;
}

}  // namespace

SymbolSequence g_recursion(const SymbolSequence& F) {
    SymbolSequence G;
    G.kind = SequenceKind::G;
    const std::size_t mu = F.terms.size();
    if (mu == 0) return G;
    const std::size_t modes = F.terms[0].size();
    G.terms.assign(mu, std::vector<ModeMeromorphic>(modes));
    parallel_for(modes, [&](std::size_t m) {
        bool exact = true;
        for (std::size_t l = 0; l < mu; ++l) exact = exact && F.terms[l][m].is_exact();
        if (exact) {
            std::vector<RationalFunctionQ> f;
            for (std::size_t l = 0; l < mu; ++l) f.push_back(*F.terms[l][m].exact());
            auto g = recursion(f);
            for (std::size_t l = 0; l < mu; ++l) G.terms[l][m] = ModeMeromorphic::from_exact(F.terms[l][m].mode(), g[l]);
        } else {
            std::vector<RationalFunctionC> f;
            for (std::size_t l = 0; l < mu; ++l) f.push_back(F.terms[l][m].numeric());
            auto g = recursion(f);
            for (std::size_t l = 0; l < mu; ++l) G.terms[l][m] = ModeMeromorphic::from_numeric(F.terms[l][m].mode(), g[l]);
        }
    });
    return G;
}

bool verify_kronecker(const SymbolSequence& F, const SymbolSequence& G, double tol) {
    const std::size_t mu = F.terms.size();
    if (G.terms.size() != mu) return false;
    if (mu == 0) return true;
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (std::size_t m = 0; m < F.terms[0].size(); ++m) {
        bool exact = true;
        for (std::size_t l = 0; l < mu; ++l) exact = exact && F.terms[l][m].is_exact() && G.terms[l][m].is_exact();
        for (std::size_t j = 0; j < mu; ++j) {
            if (exact) {
                RationalFunctionQ sum;
                for (std::size_t l = 0; l <= j; ++l)
                    sum = sum + F.terms[j - l][m].exact()->shifted(Rational(-static_cast<long>(l))) * *G.terms[l][m].exact();
                const RationalFunctionQ expect = RationalFunctionQ::polynomial(RationalPoly::constant(Rational(j == 0 ? 1 : 0)));
                if (!(sum == expect)) return false;
            } else {
                for (int s = 0; s < 16; ++s) {
                    const Complex z(U(rng), U(rng));
                    Complex sum = 0.0;
                    for (std::size_t l = 0; l <= j; ++l)
                        sum += F.terms[j - l][m](z - double(l)) * G.terms[l][m](z);
                    if (std::abs(sum - (j == 0 ? 1.0 : 0.0)) > tol) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace conelab
