#include "conelab/domains.hpp"
#include "conelab/cutoff.hpp"
#include "conelab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace conelab {

namespace {

constexpr double kLineTol = 1e-9;

Rational half_integer(int n) { return Rational(n + 1, 2); }

bool exact_gamma(double gamma) { return std::isfinite(gamma); }

// Rational position of (n+1)/2 - gamma - shift; gamma taken at its exact binary value.
Rational exact_line(int n, double gamma, int shift) {
    return half_integer(n) - exact_rational(gamma) - Rational(shift);
}

// -1 below, 0 on, +1 above the line Re z = (n+1)/2 - gamma - shift
int side_of_line(const Complex& q, const std::optional<Rational>& qe, int n, double gamma, int shift) {
    if (qe && exact_gamma(gamma)) {
        Rational d = *qe - exact_line(n, gamma, shift);
        return d < 0 ? -1 : (d > 0 ? 1 : 0);
    }
    const double d = q.real() - weight_line(n, gamma, shift);
    if (std::abs(d) <= kLineTol) return 0;
    return d < 0 ? -1 : 1;
}

}  // namespace

const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::MinimalPlain: return "MinimalPlain";
        case DomainKind::MinimalWithEpsLoss: return "MinimalWithEpsLoss";
        case DomainKind::Direct: return "Direct";
    }
    return "MinimalPlain";
}

const char* to_string(SelectionKind k) {
    switch (k) {
        case SelectionKind::Zero: return "zero";
        case SelectionKind::Full: return "full";
        case SelectionKind::Omega: return "omega";
        case SelectionKind::LogOnly: return "log-only";
        case SelectionKind::Subspace: return "subspace";
    }
    return "zero";
}

double weight_line(int n, double gamma, double shift) { return (n + 1) / 2.0 - gamma - shift; }

std::vector<NonBijectivityPoint> critical_line_poles(const ConeOperator& A, const BoundarySpectrum& S, double gamma) {
    const ConormalSymbol sigma = conormal_symbol(A, S);
    const double line = weight_line(A.n(), gamma, A.mu());
    std::vector<NonBijectivityPoint> out;
    for (const auto& p : nonbijectivity_points(sigma, line - 1.0, line + 1.0))
        if (side_of_line(p.q, p.exact, A.n(), gamma, A.mu()) == 0) out.push_back(p);
    return out;
}

DomainDescription minimal_domain(const ConeOperator& A, const BoundarySpectrum& S, double gamma, double p) {
    if (!(p > 1.0)) throw Error(ErrorCode::InvalidInput, "domains", "p must lie in (1, inf)");
    DomainDescription d;
    d.sobolev_s = A.mu();
    d.weight = gamma + A.mu();
    d.critical_line = weight_line(A.n(), gamma, A.mu());
    d.critical_line_poles = critical_line_poles(A, S, gamma);
    d.kind = d.critical_line_poles.empty() ? DomainKind::MinimalPlain : DomainKind::MinimalWithEpsLoss;
    return d;
}

namespace {

// Scalar helpers shared by the exact and floating-point generator builders.
struct ExactField {
    using T = Rational;
    static bool zero(const T& x) { return x == 0; }
    static bool same(const T& a, const T& b) { return a == b; }
    static Complex c(const T& x) { return to_complex(x); }
    static double mag(const T& x) { return std::abs(to_double(x)); }
};

struct FloatField {
    using T = Complex;
    static bool zero(const T& x) { return std::abs(x) < 1e-12; }
    static bool same(const T& a, const T& b) { return std::abs(a - b) < kLineTol; }
    static Complex c(const T& x) { return x; }
    static double mag(const T& x) { return std::abs(x); }
};

template <class F>
struct PoleData {
    typename F::T p;
    std::vector<std::vector<typename F::T>> laurent;  // per l
};

template <class F>
struct Row {
    std::vector<std::pair<std::pair<typename F::T, int>, typename F::T>> entries;  // ((q, m), coeff)
};

template <class F>
typename F::T pole_value(const Pole& p);
template <>
Rational pole_value<ExactField>(const Pole& p) { return *p.exact; }
template <>
Complex pole_value<FloatField>(const Pole& p) { return p.value; }

template <class F>
std::vector<typename F::T> pole_laurent(const Pole& p);
template <>
std::vector<Rational> pole_laurent<ExactField>(const Pole& p) { return p.laurent_exact; }
template <>
std::vector<Complex> pole_laurent<FloatField>(const Pole& p) { return p.laurent; }

template <class F>
std::optional<Rational> exact_of(const typename F::T& x);
template <>
std::optional<Rational> exact_of<ExactField>(const Rational& x) { return x; }
template <>
std::optional<Rational> exact_of<FloatField>(const Complex&) { return std::nullopt; }

// Generators of sum_k im G_k on one mode, reduced to row echelon form over the
// monomials t^{-q} log^m t, ordered from most to least singular.
template <class F>
std::vector<std::vector<Monomial>> mode_generators(const std::vector<const ModeMeromorphic*>& g, int n, double gamma) {
    using T = typename F::T;
    const int mu = static_cast<int>(g.size());
    std::vector<Row<F>> rows;
    for (int k = 0; k < mu; ++k) {
        const int lmax = k == 0 ? 0 : k;
        // poles in the window of G_k; shift of line L_k is mu - k
        std::vector<PoleData<F>> poles;
        for (int l = 0; l <= lmax; ++l) {
            for (const Pole& pole : g[static_cast<std::size_t>(l)]->poles()) {
                const int lo = side_of_line(pole.value, pole.exact, n, gamma, mu - k);
                const int hi = side_of_line(pole.value, pole.exact, n, gamma, mu - k - 1);
                const bool inside = (k == 0 ? lo > 0 : lo >= 0) && hi < 0;
                if (!inside) continue;
                const T pv = pole_value<F>(pole);
                auto it = std::find_if(poles.begin(), poles.end(), [&](const PoleData<F>& d) { return F::same(d.p, pv); });
                if (it == poles.end()) {
                    poles.push_back({pv, std::vector<std::vector<T>>(static_cast<std::size_t>(lmax + 1))});
                    it = poles.end() - 1;
                }
                it->laurent[static_cast<std::size_t>(l)] = pole_laurent<F>(pole);
            }
        }
        for (const auto& pd : poles) {
            std::size_t order = 0;
            for (const auto& lr : pd.laurent) order = std::max(order, lr.size());
            for (std::size_t r = 0; r < order; ++r) {
                Row<F> row;
                for (int l = 0; l <= lmax; ++l) {
                    const auto& R = pd.laurent[static_cast<std::size_t>(l)];
                    T inv_fact(1);
                    for (std::size_t m = 0; r + m < R.size(); ++m) {
                        if (m > 0) inv_fact = inv_fact / T(static_cast<long>(m));
                        T c = R[r + m] * inv_fact;
                        if (m % 2 == 1) c = T(0) - c;
                        if (F::zero(c)) continue;
                        row.entries.push_back({{pd.p - T(l), static_cast<int>(m)}, c});
                    }
                }
                if (!row.entries.empty()) rows.push_back(std::move(row));
            }
        }
    }

    // monomial columns
    std::vector<std::pair<T, int>> cols;
    for (const auto& row : rows)
        for (const auto& [key, c] : row.entries) {
            auto it = std::find_if(cols.begin(), cols.end(),
                                   [&](const auto& x) { return F::same(x.first, key.first) && x.second == key.second; });
            if (it == cols.end()) cols.push_back(key);
        }
    std::sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) {
        const Complex ca = F::c(a.first), cb = F::c(b.first);
        if (ca.real() != cb.real()) return ca.real() > cb.real();
        if (ca.imag() != cb.imag()) return ca.imag() < cb.imag();
        return a.second > b.second;
    });
    const std::size_t nc = cols.size();
    std::vector<std::vector<T>> M(rows.size(), std::vector<T>(nc, T(0)));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [key, c] : rows[i].entries) {
            auto it = std::find_if(cols.begin(), cols.end(),
                                   [&](const auto& x) { return F::same(x.first, key.first) && x.second == key.second; });
            M[i][static_cast<std::size_t>(it - cols.begin())] += c;
        }

    // reduced row echelon form
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nc && rank < M.size(); ++col) {
        std::size_t piv = rank;
        double best = 0.0;
        for (std::size_t i = rank; i < M.size(); ++i) {
            if (!F::zero(M[i][col]) && F::mag(M[i][col]) > best) {
                best = F::mag(M[i][col]);
                piv = i;
            }
        }
        if (best == 0.0) continue;
        std::swap(M[rank], M[piv]);
        const T inv = T(1) / M[rank][col];
        for (auto& v : M[rank]) v = v * inv;
        for (std::size_t i = 0; i < M.size(); ++i) {
            if (i == rank || F::zero(M[i][col])) continue;
            const T f = M[i][col];
            for (std::size_t j = 0; j < nc; ++j) M[i][j] -= f * M[rank][j];
        }
        ++rank;
    }
    std::vector<std::vector<Monomial>> out;
    for (std::size_t i = 0; i < rank; ++i) {
        std::vector<Monomial> terms;
        for (std::size_t j = 0; j < nc; ++j) {
            if (F::zero(M[i][j])) continue;
            terms.push_back({F::c(cols[j].first), exact_of<F>(cols[j].first), cols[j].second, F::c(M[i][j]),
                             exact_of<F>(M[i][j])});
        }
        out.push_back(std::move(terms));
    }
    return out;
}

}  // namespace

AsymptoticSpace maximal_domain_asymptotics(const ConeOperator& A, const BoundarySpectrum& S, double gamma) {
    const SymbolSequence F = taylor_sequence(A, S);
    const SymbolSequence G = g_recursion(F);
    const int mu = A.mu();
    const int n = A.n();

    AsymptoticSpace space;
    space.n = n;
    space.mu = mu;
    space.gamma = gamma;
    space.window_lower = weight_line(n, gamma, mu);
    space.window_upper = weight_line(n, gamma, 0);

    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < S.size(); ++m) {
        std::vector<const ModeMeromorphic*> g;
        bool exact = true;
        for (int l = 0; l < mu; ++l) {
            const ModeMeromorphic& gl = G.terms[static_cast<std::size_t>(l)][m];
            g.push_back(&gl);
            for (const auto& pole : gl.poles()) {
                exact = exact && pole.exact.has_value();
                for (int k = 0; k <= mu; ++k) {
                    if (side_of_line(pole.value, pole.exact, n, gamma, k) == 0) continue;
                    dist = std::min(dist, std::abs(pole.value.real() - weight_line(n, gamma, k)));
                }
            }
        }
        auto gens = exact ? mode_generators<ExactField>(g, n, gamma) : mode_generators<FloatField>(g, n, gamma);
        for (auto& terms : gens) {
            space.generators.push_back({m, S.mode(m).multiplicity, std::move(terms)});
            space.dimension += S.mode(m).multiplicity;
        }
    }
    space.epsilon = std::isfinite(dist) ? std::min(0.25, dist / 2.0) : 0.25;

    bool pole_on_critical = !critical_line_poles(A, S, gamma).empty();
    space.directness = (A.constant_coefficients() || !pole_on_critical) ? "direct" : "unknown";

    for (const auto& gen : space.generators) {
        bool coupled = false;
        for (const auto& t : gen.terms)
            if (std::abs(t.q - gen.terms.front().q) > kLineTol) coupled = true;
        for (const auto& t : gen.terms) {
            auto it = std::find_if(space.entries.begin(), space.entries.end(), [&](const AsymptoticEntry& e) {
                if (e.exact && t.q_exact) return *e.exact == *t.q_exact;
                return std::abs(e.q - t.q) < kLineTol;
            });
            if (it == space.entries.end()) {
                space.entries.push_back({t.q, t.q_exact, t.log_power, {gen.mode}, coupled});
            } else {
                it->log_powers = std::max(it->log_powers, t.log_power);
                if (std::find(it->modes.begin(), it->modes.end(), gen.mode) == it->modes.end()) it->modes.push_back(gen.mode);
                it->coupled = it->coupled || coupled;
            }
        }
    }
    std::sort(space.entries.begin(), space.entries.end(), [](const AsymptoticEntry& a, const AsymptoticEntry& b) {
        if (a.q.real() != b.q.real()) return a.q.real() > b.q.real();
        return a.q.imag() < b.q.imag();
    });
    return space;
}

DomainDescription maximal_domain(const ConeOperator& A, const BoundarySpectrum& S, double gamma, double p) {
    DomainDescription d = minimal_domain(A, S, gamma, p);
    d.asymptotics = maximal_domain_asymptotics(A, S, gamma);
    if (d.asymptotics->directness == "direct") d.kind = DomainKind::Direct;
    return d;
}

// ---------------------------------------------------------------------------
// Laplacian family

bool same_exponent(const Exponent& a, const Exponent& b) {
    if (a.mode != b.mode || a.log_pair != b.log_pair) return false;
    if (a.exact && b.exact) return *a.exact == *b.exact;
    return std::abs(a.q - b.q) < kLineTol;
}

std::vector<Exponent> indicial_roots(int n, const BoundarySpectrum& S) {
    const ConormalSymbol sigma = conormal_symbol(ConeOperator::laplacian(n), S);
    std::vector<Exponent> out;
    for (const auto& mp : sigma.modes) {
        auto roots = mp.exact ? exact_roots(*mp.exact) : clustered_roots(mp.numeric, ModeMeromorphic::kClusterTolerance);
        const int mult = S.mode(mp.mode).multiplicity;
        if (roots.size() == 1) {
            out.push_back({roots[0].value, roots[0].exact, mp.mode, mult, 0, true});
            continue;
        }
        // roots are sorted ascending by real part: q^- first
        for (std::size_t i = 0; i < roots.size(); ++i)
            out.push_back({roots[i].value, roots[i].exact, mp.mode, mult, i == 0 ? -1 : 1, false});
    }
    return out;
}

std::vector<Exponent> admissible_exponents(int n, const BoundarySpectrum& S, double gamma) {
    std::vector<Exponent> all = indicial_roots(n, S);
    std::vector<Exponent> out;
    for (const auto& e : all) {
        if (side_of_line(e.q, e.exact, n, gamma, 2) > 0 && side_of_line(e.q, e.exact, n, gamma, 0) < 0) out.push_back(e);
    }
    if (S.source() != SpectrumSource::Custom) {
        const std::size_t last = S.size() - 1;
        for (const auto& e : out) {
            if (e.mode == last) {
                throw Error(ErrorCode::InvalidInput, "domains",
                            "mode truncation too small: the last retained mode still has an exponent in I_gamma");
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Exponent& a, const Exponent& b) {
        if (a.q.real() != b.q.real()) return a.q.real() < b.q.real();
        return a.mode < b.mode;
    });
    return out;
}

int Selection::dimension() const {
    const int m = exponent.multiplicity;
    switch (kind) {
        case SelectionKind::Zero: return 0;
        case SelectionKind::Full: return exponent.log_pair ? 2 * m : m;
        case SelectionKind::Omega:
        case SelectionKind::LogOnly: return m;
        case SelectionKind::Subspace: return static_cast<int>(basis.cols());
    }
    return 0;
}

Eigen::MatrixXcd Selection::projector() const {
    const int m = exponent.multiplicity;
    switch (kind) {
        case SelectionKind::Zero: return Eigen::MatrixXcd::Zero(m, m);
        case SelectionKind::Subspace: return basis * basis.adjoint();
        default: return Eigen::MatrixXcd::Identity(m, m);
    }
}

Selection make_subspace_selection(const Exponent& e, const Eigen::MatrixXcd& vectors) {
    Selection s;
    s.exponent = e;
    const int m = e.multiplicity;
    if (vectors.rows() != m) throw Error(ErrorCode::InvalidInput, "domains", "subspace vectors have wrong length");
    if (vectors.cols() == 0) {
        s.kind = SelectionKind::Zero;
        return s;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors, Eigen::ComputeThinU);
    const double smax = svd.singularValues()(0);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * std::max(1.0, smax)) ++rank;
    if (rank == 0) {
        s.kind = SelectionKind::Zero;
    } else if (rank == m) {
        s.kind = SelectionKind::Full;
    } else {
        s.kind = SelectionKind::Subspace;
        s.basis = svd.matrixU().leftCols(rank);
    }
    return s;
}

bool Extension::dilation_invariant() const {
    return std::none_of(selections.begin(), selections.end(),
                        [](const Selection& s) { return s.kind == SelectionKind::LogOnly; });
}

bool Extension::is_minimal() const {
    return std::all_of(selections.begin(), selections.end(), [](const Selection& s) { return s.kind == SelectionKind::Zero; });
}

bool Extension::is_maximal() const {
    return std::all_of(selections.begin(), selections.end(), [](const Selection& s) { return s.kind == SelectionKind::Full; });
}

const Selection* Extension::find(const Exponent& e) const {
    for (const auto& s : selections)
        if (same_exponent(s.exponent, e)) return &s;
    return nullptr;
}

int Extension::dimension() const {
    int d = 0;
    for (const auto& s : selections) d += s.dimension();
    return d;
}

bool same_selection(const Selection& a, const Selection& b, double tol) {
    if (!same_exponent(a.exponent, b.exponent)) return false;
    if (a.exponent.log_pair) return a.kind == b.kind;
    if (a.kind == b.kind && a.kind != SelectionKind::Subspace) return true;
    return (a.projector() - b.projector()).norm() <= tol;
}

bool same_extension(const Extension& a, const Extension& b, double tol) {
    if (a.n != b.n || std::abs(a.gamma - b.gamma) > 1e-12 || std::abs(a.p - b.p) > 1e-12) return false;
    if (a.selections.size() != b.selections.size()) return false;
    for (const auto& s : a.selections) {
        const Selection* t = b.find(s.exponent);
        if (!t || !same_selection(s, *t, tol)) return false;
    }
    return true;
}

namespace {

std::string format_q(const Exponent& e) {
    if (e.exact) return to_string(*e.exact);
    std::ostringstream os;
    os.precision(12);
    os << e.q.real();
    return os.str();
}

std::string selection_token(const Selection& s) {
    if (s.kind != SelectionKind::Subspace) return to_string(s.kind);
    // coordinate subspaces are written e<i>, anything else as a generic subspace
    if (s.basis.cols() == 1) {
        for (int i = 0; i < s.basis.rows(); ++i) {
            if (std::abs(std::abs(s.basis(i, 0)) - 1.0) < 1e-12) return "e" + std::to_string(i);
        }
    }
    return "subspace";
}

std::string canonical_label(const Extension& ext) {
    if (ext.selections.empty()) return "minimal";
    std::string out;
    for (const auto& s : ext.selections) {
        if (!out.empty()) out += ';';
        out += "q=" + format_q(s.exponent) + ":" + selection_token(s);
    }
    return out;
}

void require_laplacian(const ConeOperator& A) {
    if (!A.laplacian_scale()) {
        throw Error(ErrorCode::UnsupportedOperator, "domains",
                    "extension classification is only available for the Laplacian family, got '" + A.name() + "'");
    }
}

void require_spectrum(const std::shared_ptr<const BoundarySpectrum>& S, int n) {
    if (!S) throw Error(ErrorCode::InvalidInput, "domains", "missing boundary spectrum");
    if (S->dim_boundary() != n) throw Error(ErrorCode::DimensionMismatch, "domains", "spectrum dimension differs from n");
}

Extension base_extension(int n, std::shared_ptr<const BoundarySpectrum> S, double gamma, double p) {
    Extension e;
    e.n = n;
    e.gamma = gamma;
    e.p = p;
    e.spectrum = std::move(S);
    return e;
}

}  // namespace

std::vector<Extension> enumerate_extensions(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma,
                                            double p, ExtensionFilter filter) {
    require_laplacian(A);
    require_spectrum(S, A.n());
    const auto exps = admissible_exponents(A.n(), *S, gamma);
    std::vector<std::vector<Selection>> options;
    for (const auto& e : exps) {
        std::vector<Selection> opts;
        auto simple = [&](SelectionKind k) {
            Selection s;
            s.exponent = e;
            s.kind = k;
            return s;
        };
        opts.push_back(simple(SelectionKind::Zero));
        if (e.log_pair) {
            opts.push_back(simple(SelectionKind::Omega));
            opts.push_back(simple(SelectionKind::Full));
            if (filter == ExtensionFilter::All) opts.push_back(simple(SelectionKind::LogOnly));
        } else {
            opts.push_back(simple(SelectionKind::Full));
            if (e.multiplicity > 1) {
                for (int i = 0; i < e.multiplicity; ++i) {
                    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(e.multiplicity, 1);
                    v(i, 0) = 1.0;
                    opts.push_back(make_subspace_selection(e, v));
                }
            }
        }
        options.push_back(std::move(opts));
    }
    std::vector<Extension> out;
    std::vector<std::size_t> idx(options.size(), 0);
    for (;;) {
        Extension ext = base_extension(A.n(), S, gamma, p);
        ext.operator_name = A.name();
        for (std::size_t i = 0; i < options.size(); ++i) ext.selections.push_back(options[i][idx[i]]);
        ext.label = canonical_label(ext);
        out.push_back(std::move(ext));
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out;
}

Extension minimal_extension(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma, double p) {
    require_laplacian(A);
    require_spectrum(S, A.n());
    Extension ext = base_extension(A.n(), S, gamma, p);
    ext.operator_name = A.name();
    for (const auto& e : admissible_exponents(A.n(), *S, gamma)) ext.selections.push_back({e, SelectionKind::Zero, {}});
    ext.label = "minimal";
    return ext;
}

Extension maximal_extension(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma, double p) {
    require_laplacian(A);
    require_spectrum(S, A.n());
    Extension ext = base_extension(A.n(), S, gamma, p);
    ext.operator_name = A.name();
    for (const auto& e : admissible_exponents(A.n(), *S, gamma)) ext.selections.push_back({e, SelectionKind::Full, {}});
    ext.label = ext.selections.empty() ? "minimal" : "maximal";
    return ext;
}

Extension friedrichs_domain(std::shared_ptr<const BoundarySpectrum> S, int n, double gamma) {
    require_spectrum(S, n);
    if (gamma != 0.0) throw Error(ErrorCode::WrongWeight, "domains", "the Friedrichs extension is defined for gamma = 0");
    Extension ext = base_extension(n, S, 0.0, 2.0);
    for (const auto& e : admissible_exponents(n, *S, 0.0)) {
        Selection s{e, SelectionKind::Zero, {}};
        if (n == 1) {
            if (e.log_pair) s.kind = SelectionKind::Omega;
            else if (side_of_line(e.q, e.exact, 1, 0.0, 1) < 0) s.kind = SelectionKind::Full;  // Re q < 0
        } else {
            // Re q <= (n-1)/2 = (n+1)/2 - 1
            if (side_of_line(e.q, e.exact, n, 0.0, 1) <= 0) s.kind = SelectionKind::Full;
        }
        ext.selections.push_back(s);
    }
    ext.label = "friedrichs";
    return ext;
}

Extension adjoint_extension(const Extension& ext) {
    if (!ext.spectrum) throw Error(ErrorCode::InvalidInput, "domains", "extension has no spectrum");
    if (!ext.dilation_invariant()) {
        throw Error(ErrorCode::NotDilationInvariant, "domains", "adjoint classification needs a dilation invariant extension");
    }
    Extension adj = base_extension(ext.n, ext.spectrum, -ext.gamma, ext.p / (ext.p - 1.0));
    adj.operator_name = ext.operator_name;
    const auto dual = admissible_exponents(ext.n, *ext.spectrum, -ext.gamma);
    for (const auto& e : dual) {
        // partner exponent (n-1) - q lives on the same mode
        const Selection* src = nullptr;
        for (const auto& s : ext.selections) {
            if (s.exponent.mode != e.mode) continue;
            if (e.log_pair || s.exponent.sign == -e.sign) src = &s;
        }
        Selection out{e, SelectionKind::Full, {}};
        if (!src) {
            out.kind = SelectionKind::Full;
        } else if (e.log_pair) {
            switch (src->kind) {
                case SelectionKind::Zero: out.kind = SelectionKind::Full; break;
                case SelectionKind::Full: out.kind = SelectionKind::Zero; break;
                default: out.kind = SelectionKind::Omega; break;
            }
        } else {
            switch (src->kind) {
                case SelectionKind::Zero: out.kind = SelectionKind::Full; break;
                case SelectionKind::Full: out.kind = SelectionKind::Zero; break;
                default: {
                    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(e.multiplicity, e.multiplicity) - src->projector();
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
                    std::vector<int> keep;
                    for (int i = 0; i < es.eigenvalues().size(); ++i)
                        if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
                    Eigen::MatrixXcd B(e.multiplicity, static_cast<Eigen::Index>(keep.size()));
                    for (std::size_t c = 0; c < keep.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
                    out = make_subspace_selection(e, B);
                }
            }
        }
        adj.selections.push_back(out);
    }
    adj.label = canonical_label(adj);
    if (ext.is_minimal()) adj.label = adj.selections.empty() ? "minimal" : "maximal";
    else if (ext.is_maximal()) adj.label = "minimal";
    return adj;
}

bool is_selfadjoint(const Extension& ext) {
    if (ext.gamma != 0.0 || ext.p != 2.0) {
        throw Error(ErrorCode::WrongWeight, "domains", "selfadjointness is classified in H^{0,0}_2 only (gamma=0, p=2)");
    }
    if (!ext.dilation_invariant()) return false;
    return same_extension(adjoint_extension(ext), ext);
}

std::vector<Extension> selfadjoint_extensions(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S) {
    std::vector<Extension> out;
    for (auto& e : enumerate_extensions(A, std::move(S), 0.0, 2.0, ExtensionFilter::DilationInvariant))
        if (is_selfadjoint(e)) out.push_back(std::move(e));
    return out;
}

// ---------------------------------------------------------------------------
// pairing

namespace {

// coeff * t^w omega^{(w)}(t) * t^{-a} * log^m t
struct SymTerm {
    int w = 0;
    Complex a;
    int m = 0;
    Complex c;
};

using Expr = std::vector<SymTerm>;

void add_term(Expr& e, const SymTerm& t) {
    if (t.c == Complex(0.0)) return;
    for (auto& x : e) {
        if (x.w == t.w && x.m == t.m && std::abs(x.a - t.a) < 1e-13) {
            x.c += t.c;
            return;
        }
    }
    e.push_back(t);
}

Expr theta(const Expr& e) {
    Expr out;
    for (const auto& t : e) {
        add_term(out, {t.w, t.a, t.m, t.c * (double(t.w) - t.a)});
        add_term(out, {t.w + 1, t.a, t.m, t.c});
        if (t.m > 0) add_term(out, {t.w, t.a, t.m - 1, t.c * double(t.m)});
    }
    return out;
}

// t^{-2} (theta^2 + (n-1) theta + lambda)
Expr apply_laplacian(const Expr& u, int n, double lambda) {
    Expr th = theta(u);
    Expr th2 = theta(th);
    Expr out;
    for (auto t : th2) add_term(out, {t.w, t.a + 2.0, t.m, t.c});
    for (auto t : th) add_term(out, {t.w, t.a + 2.0, t.m, t.c * double(n - 1)});
    for (auto t : u) add_term(out, {t.w, t.a + 2.0, t.m, t.c * lambda});
    return out;
}

Expr conj(const Expr& e) {
    Expr out;
    for (auto t : e) out.push_back({t.w, std::conj(t.a), t.m, std::conj(t.c)});
    return out;
}

Complex eval(const Expr& e, double t) {
    const double L = std::log(t);
    Complex acc = 0.0;
    for (const auto& x : e) {
        const double wk = std::pow(t, x.w) * cutoff_derivative(t, x.w);
        if (wk == 0.0) continue;
        acc += x.c * wk * std::exp(-x.a * L) * std::pow(L, x.m);
    }
    return acc;
}

// near t = 0 the cut-off is identically 1: keep only w = 0 terms
Expr near_zero(const Expr& e) {
    Expr out;
    for (const auto& t : e)
        if (t.w == 0) add_term(out, t);
    return out;
}

// product of two near-zero expansions, t^{-a} log^m with a = a1 + a2
Expr multiply(const Expr& x, const Expr& y) {
    Expr out;
    for (const auto& s : x)
        for (const auto& t : y) add_term(out, {0, s.a + t.a, s.m + t.m, s.c * t.c});
    return out;
}

double scale_of(const Expr& e) {
    double s = 0.0;
    for (const auto& t : e) s = std::max(s, std::abs(t.c));
    return s;
}

// int_0^c t^s log^k t dt for Re s > -1
Complex power_log_integral(Complex s, int k, double c) {
    const Complex s1 = s + 1.0;
    const double L = std::log(c);
    Complex acc = 0.0;
    // I_k = c^{s+1} L^k/(s+1) - k/(s+1) I_{k-1}
    std::vector<Complex> I(static_cast<std::size_t>(k + 1));
    const Complex cs = std::exp(s1 * L);
    for (int j = 0; j <= k; ++j) {
        I[static_cast<std::size_t>(j)] = cs * std::pow(L, j) / s1;
        if (j > 0) I[static_cast<std::size_t>(j)] -= double(j) / s1 * I[static_cast<std::size_t>(j - 1)];
    }
    acc = I[static_cast<std::size_t>(k)];
    return acc;
}

Expr element_expr(const PairingElement& u) {
    Expr e;
    for (const auto& m : u.terms) add_term(e, {0, m.q, m.log_power, m.coeff});
    return e;
}

}  // namespace

PairingResult pairing_bracket(const PairingElement& u, const PairingElement& v, int n, const BoundarySpectrum& S,
                              const QuadratureOptions& opts) {
    if (u.mode != v.mode) return {Complex(0.0), Complex(0.0)};
    if (u.mode >= S.size()) throw Error(ErrorCode::InvalidInput, "domains", "pairing element mode outside the spectrum");
    if (u.component.size() != v.component.size()) {
        throw Error(ErrorCode::DimensionMismatch, "domains", "pairing components have different lengths");
    }
    const Complex ef = v.component.dot(u.component);  // <e, f> = sum e_i conj(f_i)
    if (std::abs(ef) == 0.0) return {Complex(0.0), Complex(0.0)};
    const double lambda = S.mode(u.mode).eigenvalue;

    const Expr U = element_expr(u);
    const Expr V = conj(element_expr(v));
    const Expr dU = apply_laplacian(U, n, lambda);
    const Expr dV = apply_laplacian(V, n, lambda);

    // integrand (Delta u) conj(v) - u conj(Delta v), weight t^n
    auto integrand = [&](double t) { return (eval(dU, t) * eval(V, t) - eval(U, t) * eval(dV, t)) * std::pow(t, n); };

    // analytic part on (0, 1/4]
    Expr near = multiply(near_zero(dU), near_zero(V));
    for (auto t : multiply(near_zero(U), near_zero(dV))) add_term(near, {0, t.a, t.m, -t.c});
    const double nscale = std::max(scale_of(near), 1.0);
    Complex inner = 0.0;
    for (const auto& t : near) {
        if (std::abs(t.c) <= 1e-12 * nscale) continue;
        const Complex s = double(n) - t.a;
        if (!(s.real() > -1.0)) {
            throw Error(ErrorCode::QuadratureFailure, "domains", "bracket integrand is not integrable at t = 0");
        }
        inner += t.c * power_log_integral(s, t.m, kCutoffInner);
    }

    using boost::math::quadrature::gauss_kronrod;
    double err_re = 0.0, err_im = 0.0;
    const double re = gauss_kronrod<double, 61>::integrate([&](double t) { return integrand(t).real(); }, kCutoffInner,
                                                           kCutoffOuter, opts.max_depth, opts.tolerance, &err_re);
    const double im = gauss_kronrod<double, 61>::integrate([&](double t) { return integrand(t).imag(); }, kCutoffInner,
                                                           kCutoffOuter, opts.max_depth, opts.tolerance, &err_im);
    if (!std::isfinite(re) || !std::isfinite(im)) {
        throw Error(ErrorCode::QuadratureFailure, "domains", "bracket quadrature did not converge");
    }
    const Complex direct = (inner + Complex(re, im)) * ef;

    // closed form: the integrand is d/dt (t^{n-1} W), W = (theta u) conj v - u theta(conj v)
    Expr W = multiply(near_zero(theta(U)), near_zero(V));
    for (auto t : multiply(near_zero(U), near_zero(theta(V)))) add_term(W, {0, t.a, t.m, -t.c});
    const double wscale = std::max(scale_of(W), 1.0);
    Complex limit = 0.0;
    for (const auto& t : W) {
        if (std::abs(t.c) <= 1e-12 * wscale) continue;
        const Complex s = double(n - 1) - t.a;  // exponent of t in t^{n-1} W
        if (std::abs(s) < 1e-12 && t.m == 0) limit += t.c;
        else if (!(s.real() > 0.0)) {
            throw Error(ErrorCode::QuadratureFailure, "domains", "boundary term of the bracket diverges");
        }
    }
    return {direct, -limit * ef};
}

std::vector<PairingElement> extension_elements(const Extension& ext) {
    std::vector<PairingElement> out;
    for (const auto& s : ext.selections) {
        const auto& e = s.exponent;
        const int m = e.multiplicity;
        auto mono = [&](int k) { return Monomial{e.q, e.exact, k, Complex(1.0), Rational(1)}; };
        auto push_basis = [&](const Eigen::MatrixXcd& B, std::vector<Monomial> terms) {
            for (int c = 0; c < B.cols(); ++c) out.push_back({e.mode, B.col(c), terms});
        };
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
        switch (s.kind) {
            case SelectionKind::Zero: break;
            case SelectionKind::Full:
                push_basis(I, {mono(0)});
                if (e.log_pair) push_basis(I, {mono(1)});
                break;
            case SelectionKind::Omega: push_basis(I, {mono(0)}); break;
            case SelectionKind::LogOnly: push_basis(I, {mono(1)}); break;
            case SelectionKind::Subspace: push_basis(s.basis, {mono(0)}); break;
        }
    }
    return out;
}

std::vector<PairingElement> asymptotic_elements(int n, const BoundarySpectrum& S, double gamma) {
    Extension full;
    full.n = n;
    full.gamma = gamma;
    for (const auto& e : admissible_exponents(n, S, gamma)) full.selections.push_back({e, SelectionKind::Full, {}});
    return extension_elements(full);
}

}  // namespace conelab
