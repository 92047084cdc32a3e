#include "conelab/ellipticity.hpp"
#include "conelab/error.hpp"
#include "conelab/parallel.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace conelab {

Sector::Sector(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta < std::numbers::pi)) {
        throw Error(ErrorCode::InvalidInput, "ellipticity", "sector angle must lie in [0, pi)");
    }
}

bool Sector::contains(Complex z) const {
    if (z == Complex(0.0)) return true;
    return std::abs(std::arg(z)) >= theta_ - 1e-15;
}

std::vector<Complex> Sector::default_samples() const {
    std::vector<Complex> out;
    for (Complex z : {Complex(-1.0), Complex(-10.0), std::polar(5.0, 0.75 * std::numbers::pi)})
        if (contains(z)) out.push_back(z);
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotCovered: return "not-covered-by-paper-rules";
        case Verdict::Disagreement: return "disagreement";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "fail";
}

const char* to_string(Admissibility a) {
    switch (a) {
        case Admissibility::DMin: return "minimal-domain";
        case Admissibility::Selected: return "selected";
        case Admissibility::Excluded: return "excluded";
    }
    return "excluded";
}

E1Result check_E1(const ConeOperator& A, const Sector& sector, int angles, int radii) {
    if (angles < 2 || radii < 1) throw Error(ErrorCode::InvalidInput, "ellipticity", "E1 grid too small");
    E1Result r;
    r.angles = angles;
    r.radii = radii;
    r.min_real = std::numeric_limits<double>::infinity();
    r.max_real = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < radii; ++k) {
        const double t = radii == 1 ? 0.0 : double(k) / (radii - 1);
        auto symbol = t == 0.0 ? rescaled_symbol(A) : interior_symbol(A, t);
        for (int i = 0; i < angles; ++i) {
            const double phi = -std::numbers::pi / 2 + std::numbers::pi * i / (angles - 1);
            const double xi = std::max(0.0, std::cos(phi));
            const double tau = std::sin(phi);
            const Complex v = symbol(xi * xi, tau);
            r.min_real = std::min(r.min_real, v.real());
            r.max_real = std::max(r.max_real, v.real());
            r.max_abs_imag = std::max(r.max_abs_imag, std::abs(v.imag()));
            if (r.pass && sector.contains(-v)) {
                r.pass = false;
                r.witness = E1Witness{xi * xi, tau, t, -v};
            }
        }
    }
    return r;
}

E2Result check_E2(const Extension& ext) {
    E2Result r;
    for (const auto& s : ext.selections) {
        if (s.kind == SelectionKind::LogOnly) {
            r.pass = false;
            r.offending.push_back("q=" + (s.exponent.exact ? to_string(*s.exponent.exact) : std::to_string(s.exponent.q.real())) +
                                  ": span{omega log t} without omega");
        }
    }
    return r;
}

namespace {

void require_weight(const Extension& ext) {
    if (std::abs(ext.gamma) >= (ext.n + 1) / 2.0) {
        throw Error(ErrorCode::WeightOutOfRange, "ellipticity", "|gamma| must be below (n+1)/2");
    }
}

void require_complete(const Extension& ext) {
    if (!ext.spectrum) throw Error(ErrorCode::InvalidInput, "ellipticity", "extension has no spectrum");
    const auto exps = admissible_exponents(ext.n, *ext.spectrum, ext.gamma);
    if (exps.size() != ext.selections.size()) {
        throw Error(ErrorCode::InvalidInput, "ellipticity", "extension does not select a subspace for every exponent of I_gamma");
    }
    for (const auto& e : exps)
        if (!ext.find(e)) throw Error(ErrorCode::InvalidInput, "ellipticity", "extension selection misses an exponent of I_gamma");
}

const Selection* partner_of(const Extension& ext, const Selection& s) {
    for (const auto& o : ext.selections) {
        if (o.exponent.mode != s.exponent.mode) continue;
        if (s.exponent.log_pair ? &o == &s : o.exponent.sign == -s.exponent.sign) return &o;
    }
    return nullptr;
}

}  // namespace

RuleResult check_E3_rule(const Extension& ext, const Sector& sector) {
    require_weight(ext);
    require_complete(ext);
    RuleResult r;
    if (sector.theta() == 0.0) {
        r.verdict = Verdict::Fail;
        r.rule = "sector";
        r.reason = "Lambda_0 is the whole plane and meets the spectrum [0, inf) of the model cone operator";
        return r;
    }
    const int n = ext.n;
    if (n + 1 >= 4) {
        r.rule = "dim B >= 4";
        const bool ok = (ext.is_maximal() && ext.gamma >= 0.0) || (ext.is_minimal() && ext.gamma <= 0.0);
        r.verdict = ok ? Verdict::Pass : Verdict::NotCovered;
        if (!ok) r.reason = "only the maximal (gamma >= 0) and minimal (gamma <= 0) extensions are covered";
        return r;
    }
    r.rule = "dim B <= 3";
    if (!ext.dilation_invariant()) {
        r.verdict = Verdict::Fail;
        r.reason = "extension is not dilation invariant";
        return r;
    }
    for (const auto& s : ext.selections) {
        const Selection* p = partner_of(ext, s);
        const std::string q = s.exponent.exact ? to_string(*s.exponent.exact) : std::to_string(s.exponent.q.real());
        if (p) {
            // rule (i): the selection at the partner exponent is the orthogonal complement
            bool ok;
            if (s.exponent.log_pair) {
                ok = s.kind == SelectionKind::Omega;
            } else {
                const int m = s.exponent.multiplicity;
                Eigen::MatrixXcd sum = s.projector() + p->projector();
                ok = (sum - Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-10 && (s.projector() * p->projector()).norm() < 1e-10;
            }
            if (!ok) {
                r.verdict = Verdict::NotCovered;
                r.reason = "rule (i) fails at q=" + q;
                return r;
            }
        } else if (ext.gamma >= 0.0 && s.kind != SelectionKind::Full) {
            r.verdict = Verdict::NotCovered;
            r.reason = "rule (ii) requires the full space at q=" + q;
            return r;
        } else if (ext.gamma <= 0.0 && s.kind != SelectionKind::Zero) {
            r.verdict = Verdict::NotCovered;
            r.reason = "rule (iii) requires the zero space at q=" + q;
            return r;
        }
    }
    r.verdict = Verdict::Pass;
    return r;
}

namespace {

using State = std::array<Complex, 2>;  // (log w, theta w / w)

struct Frobenius {
    Complex w;
    Complex theta_w;
};

// t^sigma sum_k c_k t^{2k}, c_k = -lambda c_{k-1} / ((sigma+2k)^2 - nu^2)
Frobenius frobenius(double sigma, double nu, Complex lambda, double t) {
    Complex c = 1.0, sum = 1.0, dsum = sigma;
    const double t2 = t * t;
    for (int k = 1; k < 80; ++k) {
        const double d = (sigma + 2 * k) * (sigma + 2 * k) - nu * nu;
        c *= -lambda * t2 / d;
        sum += c;
        dsum += (sigma + 2 * k) * c;
        if (std::abs(c) < 1e-18 * std::abs(sum)) break;
    }
    const double tp = std::pow(t, sigma);
    return {tp * sum, tp * dsum};
}

struct ModeSolution {
    std::vector<double> s;
    std::vector<State> x;
    State at_match;
    double s_match = 0.0;
};

ModeSolution integrate_decaying(double nu, Complex lambda, const NumericOptions& opts) {
    namespace ode = boost::numeric::odeint;
    const double scale = std::sqrt(std::abs(lambda));
    const double s_max = std::log(opts.t_max_scale / scale);
    const double s_min = std::log(opts.t_min);
    const double s_match = std::log(0.5 / scale);

    const Complex kappa = std::sqrt(-lambda);  // principal branch, Re kappa > 0 off [0, inf)
    const Complex x = kappa * std::exp(s_max);
    const double a1 = (4 * nu * nu - 1) / 8.0;
    const double a2 = (4 * nu * nu - 1) * (4 * nu * nu - 9) / 128.0;
    const Complex S = 1.0 + a1 / x + a2 / (x * x);
    State state{-0.5 * std::log(x) - x + std::log(S), -0.5 - x + (-a1 / x - 2.0 * a2 / (x * x)) / S};

    std::vector<double> times{s_max};
    if (s_match < s_max && s_match > s_min + std::log(10.0)) times.push_back(s_match);
    const int fp = std::max(opts.fit_points, 4);
    for (int i = 0; i < fp; ++i) times.push_back(s_min + std::log(10.0) * (1.0 - double(i) / (fp - 1)));

    ModeSolution sol;
    sol.s_match = s_match;
    auto rhs = [&](const State& y, State& dy, double s) {
        dy[0] = y[1];
        dy[1] = nu * nu - lambda * std::exp(2.0 * s) - y[1] * y[1];
    };
    auto observer = [&](const State& y, double s) {
        if (s == s_match) sol.at_match = y;
        if (s <= s_min + std::log(10.0) + 1e-12) {
            sol.s.push_back(s);
            sol.x.push_back(y);
        }
    };
    auto stepper = ode::make_controlled(opts.tolerance, opts.tolerance, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, state, times.begin(), times.end(), -1e-3, observer);
    if (!(times.size() > 1 && times[1] == s_match)) {
        // match point outside the integration range: fall back to the innermost sample
        sol.s_match = sol.s.front();
        sol.at_match = sol.x.front();
    }
    return sol;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Allowed {
    Admissibility kind = Admissibility::Excluded;
    Eigen::MatrixXcd projector;  // onto the allowed part of the eigenspace
    int dimension = 0;
};

Admissibility classify(double re_q, const Extension& ext) {
    const double lower = weight_line(ext.n, ext.gamma, 2.0);
    const double upper = weight_line(ext.n, ext.gamma, 0.0);
    if (re_q <= lower + 1e-12) return Admissibility::DMin;
    if (re_q >= upper - 1e-12) return Admissibility::Excluded;
    return Admissibility::Selected;
}

const Selection* selection_for(const Extension& ext, std::size_t mode, int sign) {
    for (const auto& s : ext.selections)
        if (s.exponent.mode == mode && (s.exponent.log_pair || s.exponent.sign == sign)) return &s;
    return nullptr;
}

Allowed allowed_space(const Extension& ext, std::size_t mode, int sign, double re_q, int m) {
    Allowed a;
    a.kind = classify(re_q, ext);
    switch (a.kind) {
        case Admissibility::DMin:
            a.projector = Eigen::MatrixXcd::Identity(m, m);
            a.dimension = m;
            break;
        case Admissibility::Excluded:
            a.projector = Eigen::MatrixXcd::Zero(m, m);
            break;
        case Admissibility::Selected: {
            const Selection* s = selection_for(ext, mode, sign);
            if (!s) throw Error(ErrorCode::InvalidInput, "ellipticity", "extension misses a selection for an exponent of I_gamma");
            a.projector = s->projector();
            a.dimension = s->dimension();
        }
    }
    return a;
}

int intersection_dimension(const std::vector<Eigen::MatrixXcd>& projectors, int m) {
    if (projectors.empty()) return m;
    Eigen::MatrixXcd stacked(m * static_cast<Eigen::Index>(projectors.size()), m);
    for (std::size_t i = 0; i < projectors.size(); ++i)
        stacked.middleRows(static_cast<Eigen::Index>(i) * m, m) = Eigen::MatrixXcd::Identity(m, m) - projectors[i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-8) ++rank;
    return m - rank;
}

NumericModeDetail analyse_mode(const Extension& ext, std::size_t mode, Complex lambda, const NumericOptions& opts) {
    const BoundarySpectrum& S = *ext.spectrum;
    const int n = ext.n;
    const int m = S.mode(mode).multiplicity;
    const double h = (n - 1) / 2.0;
    NumericModeDetail d;
    d.mode = mode;
    d.lambda = lambda;
    d.nu = std::sqrt(std::max(0.0, h * h - S.mode(mode).eigenvalue));
    d.q_plus = h + d.nu;
    d.q_minus = h - d.nu;

    const ModeSolution sol = integrate_decaying(d.nu, lambda, opts);
    const bool log_case = d.nu < 1e-12;

    if (log_case) {
        // w ~ c + d log t near 0; normalise by the innermost value to keep magnitudes moderate
        const Complex ref = sol.x.back()[0];
        Eigen::MatrixXcd M(static_cast<Eigen::Index>(sol.s.size()), 2);
        Eigen::VectorXcd rhs(static_cast<Eigen::Index>(sol.s.size()));
        for (std::size_t i = 0; i < sol.s.size(); ++i) {
            M(static_cast<Eigen::Index>(i), 0) = 1.0;
            M(static_cast<Eigen::Index>(i), 1) = sol.s[i];
            rhs(static_cast<Eigen::Index>(i)) = std::exp(sol.x[i][0] - ref);
        }
        Eigen::VectorXcd cd = M.colPivHouseholderQr().solve(rhs);
        const double s_in = sol.s.back();
        const double log_size = std::abs(cd(1)) * std::abs(s_in);
        const double const_size = std::abs(cd(0));
        const double rl = log_size / (log_size + const_size);
        const double rc = const_size / (log_size + const_size);
        auto present = [&](double r, bool& out) {
            if (r > 1e-3) out = true;
            else if (r < 1e-6) out = false;
            else d.inconclusive = true;
        };
        present(rl, d.dominant_present);
        present(rc, d.subdominant_present);
        d.subdominant_ratio = const_size / std::max(log_size, 1e-300);
        d.slope = least_squares_slope(sol.s, [&] {
            std::vector<double> v;
            for (std::size_t i = 0; i < sol.s.size(); ++i) v.push_back(sol.x[i][0].real() - h * sol.s[i]);
            return v;
        }());

        d.plus = d.minus = classify(h, ext);
        int allowed_count = 0;
        bool const_ok = false, log_ok = false;
        if (d.plus == Admissibility::DMin) {
            const_ok = log_ok = true;
        } else if (d.plus == Admissibility::Selected) {
            const Selection* s = selection_for(ext, mode, 0);
            if (!s) throw Error(ErrorCode::InvalidInput, "ellipticity", "extension misses the log pair selection");
            const_ok = s->kind == SelectionKind::Full || s->kind == SelectionKind::Omega;
            log_ok = s->kind == SelectionKind::Full || s->kind == SelectionKind::LogOnly;
        }
        allowed_count = int(const_ok) + int(log_ok);
        d.index = allowed_count * m - m;
        const bool in_domain = (!d.dominant_present || log_ok) && (!d.subdominant_present || const_ok);
        d.kernel_dimension = in_domain ? m : 0;
    } else {
        std::vector<double> v;
        for (std::size_t i = 0; i < sol.s.size(); ++i) v.push_back(sol.x[i][0].real() - h * sol.s[i]);
        d.slope = least_squares_slope(sol.s, v);
        const double mid = -h;
        if (std::abs(d.slope - mid) < opts.slope_margin) d.inconclusive = true;
        d.dominant_present = d.slope < mid;

        // weight of t^{-q-} against t^{-q+} by Frobenius matching
        const bool resonant = std::abs(d.nu - std::round(d.nu)) < 1e-9;
        if (!d.dominant_present) {
            d.subdominant_present = true;
            d.subdominant_ratio = std::numeric_limits<double>::infinity();
        } else if (resonant) {
            d.subdominant_present = true;
            d.subdominant_ratio = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double t0 = std::exp(sol.s_match);
            const Frobenius wp = frobenius(d.nu, d.nu, lambda, t0);    // t^{-q-} behaviour
            const Frobenius wm = frobenius(-d.nu, d.nu, lambda, t0);   // t^{-q+} behaviour
            const Complex y = sol.at_match[1];
            // A wp + B wm = 1, A theta wp + B theta wm = y
            const Complex det = wp.w * wm.theta_w - wm.w * wp.theta_w;
            const Complex A = (wm.theta_w - y * wm.w) / det;
            const Complex B = (y * wp.w - wp.theta_w) / det;
            d.subdominant_ratio = std::abs(A * wp.w) / std::abs(B * wm.w);
            d.subdominant_present = d.subdominant_ratio > 1e-8;
        }

        const Allowed ap = allowed_space(ext, mode, +1, d.q_plus.real(), m);
        const Allowed am = allowed_space(ext, mode, -1, d.q_minus.real(), m);
        d.plus = ap.kind;
        d.minus = am.kind;
        d.index = ap.dimension + am.dimension - m;
        std::vector<Eigen::MatrixXcd> req;
        if (d.dominant_present) req.push_back(ap.projector);
        if (d.subdominant_present) req.push_back(am.projector);
        d.kernel_dimension = intersection_dimension(req, m);
    }
    d.spectral = !d.inconclusive && d.kernel_dimension > 0;
    return d;
}

}  // namespace

NumericResult check_E3_numeric(const Extension& ext, const Sector& sector, const std::vector<Complex>& samples,
                               const NumericOptions& opts) {
    require_weight(ext);
    require_complete(ext);
    for (const Complex& l : samples) {
        if (l == Complex(0.0) || !sector.contains(l) || (l.imag() == 0.0 && l.real() > 0.0)) {
            throw Error(ErrorCode::PreconditionViolated, "ellipticity",
                        "sample lambda must lie in the sector, away from 0 and the positive axis");
        }
    }
    NumericResult r;
    if (sector.theta() == 0.0) {
        r.verdict = Verdict::Fail;
        r.reason = "Lambda_0 meets the spectrum [0, inf) of the model cone operator";
        return r;
    }
    const std::size_t modes = ext.spectrum->size();
    r.details.resize(modes * samples.size());
    parallel_for(r.details.size(), [&](std::size_t i) {
        r.details[i] = analyse_mode(ext, i / samples.size(), samples[i % samples.size()], opts);
    });
    std::size_t conclusive = 0;
    for (std::size_t i = 0; i < r.details.size(); ++i) {
        const auto& d = r.details[i];
        if (d.index != 0 && !r.witness) {
            r.witness = i;
            r.reason = "mode " + std::to_string(d.mode) + " has index " + std::to_string(d.index);
        }
        if (d.inconclusive) {
            ++r.inconclusive;
            continue;
        }
        ++conclusive;
        if (d.spectral && !r.witness) {
            r.witness = i;
            r.reason = "decaying solution on mode " + std::to_string(d.mode) + " lies in the domain";
        }
    }
    if (r.witness) r.verdict = Verdict::Fail;
    else if (conclusive == 0 && !r.details.empty()) r.verdict = Verdict::Inconclusive;
    else r.verdict = Verdict::Pass;
    return r;
}

EllipticityReport check_ellipticity(const ConeOperator& A, const Extension& ext, const Sector& sector, E3Method method,
                                    const std::vector<Complex>& samples, const NumericOptions& opts) {
    if (!A.laplacian_scale()) {
        throw Error(ErrorCode::UnsupportedOperator, "ellipticity", "(E3) is only available for the Laplacian family");
    }
    EllipticityReport rep;
    rep.e1 = check_E1(A, sector);
    rep.e2 = check_E2(ext);
    if (method != E3Method::Numeric) rep.e3_rule = check_E3_rule(ext, sector);
    if (method != E3Method::Rule) {
        rep.e3_numeric = check_E3_numeric(ext, sector, samples.empty() ? sector.default_samples() : samples, opts);
    }
    switch (method) {
        case E3Method::Rule: rep.e3 = rep.e3_rule->verdict; break;
        case E3Method::Numeric: rep.e3 = rep.e3_numeric->verdict; break;
        case E3Method::Both: {
            const Verdict rv = rep.e3_rule->verdict;
            const Verdict nv = rep.e3_numeric->verdict;
            if (rv == Verdict::Pass) rep.e3 = nv == Verdict::Fail ? Verdict::Disagreement : Verdict::Pass;
            else if (rv == Verdict::NotCovered) rep.e3 = nv == Verdict::Fail ? Verdict::Fail : Verdict::NotCovered;
            else rep.e3 = rv;
        }
    }
    rep.overall = rep.e1.pass && rep.e2.pass && rep.e3 == Verdict::Pass;
    return rep;
}

}  // namespace conelab
