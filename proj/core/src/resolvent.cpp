#include "conelab/resolvent.hpp"
#include "conelab/ellipticity.hpp"
#include "conelab/error.hpp"
#include "conelab/parallel.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace conelab {

const char* to_string(Behaviour b) {
    switch (b) {
        case Behaviour::Plus: return "t^-q+";
        case Behaviour::Minus: return "t^-q-";
        case Behaviour::Constant: return "1";
        case Behaviour::Log: return "log t";
    }
    return "t^-q-";
}

namespace {

constexpr double kIllConditioned = 1e12;

double nu_of(const DiscreteDomain& dd, std::size_t mode) {
    const double h = (dd.extension.n - 1) / 2.0;
    return std::sqrt(std::max(0.0, h * h - dd.extension.spectrum->mode(mode).eigenvalue));
}

enum class Status { DMin, Selected, Excluded };

Status status_of(double re_q, const Extension& ext) {
    if (re_q <= weight_line(ext.n, ext.gamma, 2.0) + 1e-12) return Status::DMin;
    if (re_q >= weight_line(ext.n, ext.gamma, 0.0) - 1e-12) return Status::Excluded;
    return Status::Selected;
}

const Selection* find_selection(const Extension& ext, std::size_t mode, int sign) {
    for (const auto& s : ext.selections)
        if (s.exponent.mode == mode && (s.exponent.log_pair || s.exponent.sign == sign)) return &s;
    return nullptr;
}

[[noreturn]] void not_index_zero(std::size_t mode) {
    throw Error(ErrorCode::PreconditionViolated, "resolvent",
                "extension does not fix one admissible behaviour per eigenvector on mode " + std::to_string(mode));
}

Eigen::MatrixXcd allowed_projector(const Extension& ext, std::size_t mode, int sign, double re_q, int m) {
    switch (status_of(re_q, ext)) {
        case Status::DMin: return Eigen::MatrixXcd::Identity(m, m);
        case Status::Excluded: return Eigen::MatrixXcd::Zero(m, m);
        case Status::Selected: {
            const Selection* s = find_selection(ext, mode, sign);
            if (!s) throw Error(ErrorCode::InvalidInput, "resolvent", "extension misses a selection for an exponent of I_gamma");
            return s->projector();
        }
    }
    return Eigen::MatrixXcd::Zero(m, m);
}

int rank_of(const Eigen::MatrixXcd& P) { return static_cast<int>(std::lround(P.trace().real())); }

struct Frob {
    Complex w;
    Complex theta_w;
};

Frob frobenius(double sigma, double nu, Complex lambda, double t) {
    Complex c = 1.0, sum = 1.0, dsum = sigma;
    for (int k = 1; k < 60; ++k) {
        const double d = (sigma + 2 * k) * (sigma + 2 * k) - nu * nu;
        if (std::abs(d) < 1e-12) break;  // resonance: the remaining terms are below t^{2 nu}
        c *= -lambda * t * t / d;
        sum += c;
        dsum += (sigma + 2 * k) * c;
        if (std::abs(c) < 1e-18 * std::abs(sum)) break;
    }
    return {sum, dsum};
}

// theta u / u of the admissible local solution at t_min
Complex robin_coefficient(const DiscreteDomain& dd, Complex lambda, std::size_t mode, Behaviour b) {
    const double nu = nu_of(dd, mode);
    const double h = (dd.extension.n - 1) / 2.0;
    const Complex lam = lambda / dd.scale;
    const double t = dd.t_min;
    Complex ratio;
    switch (b) {
        case Behaviour::Plus: {
            const Frob f = frobenius(-nu, nu, lam, t);
            ratio = f.theta_w / f.w;
            break;
        }
        case Behaviour::Minus:
        case Behaviour::Constant: {
            const Frob f = frobenius(nu, nu, lam, t);
            ratio = f.theta_w / f.w;
            break;
        }
        case Behaviour::Log: ratio = 1.0 / std::log(t); break;
    }
    return -h + ratio;
}

struct Tridiag {
    std::vector<Complex> lower, diag, upper;
};

// lambda Mass + c K on the unknowns 0..N-2
Tridiag assemble(const DiscreteDomain& dd, Complex lambda, std::size_t mode, std::size_t part) {
    const int n = dd.extension.n;
    const int N = dd.nodes - 1;
    const double lj = dd.extension.spectrum->mode(mode).eigenvalue;
    const double h = dd.h;
    const double c = dd.scale;
    const Complex kappa = robin_coefficient(dd, lambda, mode, dd.parts[mode][part].behaviour);
    Tridiag T;
    T.diag.resize(static_cast<std::size_t>(N));
    T.lower.resize(static_cast<std::size_t>(N - 1));
    T.upper.resize(static_cast<std::size_t>(N - 1));
    for (int i = 0; i < N; ++i) {
        const double si = dd.s[static_cast<std::size_t>(i)];
        const double w = i == 0 ? h / 2 : h;
        const double mass = w * std::exp((n + 1) * si);
        const double k = w * std::exp((n - 1) * si);
        const double ar = std::exp((n - 1) * (si + h / 2));
        Complex d = lambda * mass + c * lj * k - c * ar / h;
        if (i == 0) d -= c * std::exp((n - 1) * si) * kappa;
        else d -= c * std::exp((n - 1) * (si - h / 2)) / h;
        T.diag[static_cast<std::size_t>(i)] = d;
        if (i + 1 < N) {
            T.upper[static_cast<std::size_t>(i)] = c * ar / h;
            T.lower[static_cast<std::size_t>(i)] = c * ar / h;
        }
    }
    return T;
}

std::vector<double> mass_diagonal(const DiscreteDomain& dd) {
    const int n = dd.extension.n;
    std::vector<double> m(static_cast<std::size_t>(dd.nodes - 1));
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (i == 0 ? dd.h / 2 : dd.h) * std::exp((n + 1) * dd.s[i]);
    return m;
}

Eigen::VectorXcd multiply(const Tridiag& T, const Eigen::VectorXcd& x) {
    const Eigen::Index N = static_cast<Eigen::Index>(T.diag.size());
    Eigen::VectorXcd y(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        Complex v = T.diag[static_cast<std::size_t>(i)] * x(i);
        if (i > 0) v += T.lower[static_cast<std::size_t>(i - 1)] * x(i - 1);
        if (i + 1 < N) v += T.upper[static_cast<std::size_t>(i)] * x(i + 1);
        y(i) = v;
    }
    return y;
}

// LU factorisation of the Jacobi-scaled matrix D T D
struct Factor {
    std::vector<Complex> dl, d, du, du2;
    std::vector<lapack_int> ipiv;
    std::vector<double> D;
    double rcond = 0.0;

    Eigen::VectorXcd solve(const Eigen::VectorXcd& b, char trans = 'N') const {
        const lapack_int N = static_cast<lapack_int>(d.size());
        std::vector<Complex> x(static_cast<std::size_t>(N));
        for (lapack_int i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = D[static_cast<std::size_t>(i)] * b(i);
        const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, trans, N, 1, dl.data(), d.data(), du.data(), du2.data(),
                                               ipiv.data(), x.data(), N);
        if (info != 0) throw Error(ErrorCode::IllConditioned, "resolvent", "tridiagonal solve failed");
        Eigen::VectorXcd out(N);
        for (lapack_int i = 0; i < N; ++i) out(i) = D[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        return out;
    }
};

Factor factorise(const Tridiag& T, std::size_t mode, bool strict = true) {
    const std::size_t N = T.diag.size();
    Factor F;
    F.D.resize(N);
    for (std::size_t i = 0; i < N; ++i) F.D[i] = 1.0 / std::sqrt(std::max(std::abs(T.diag[i]), 1e-300));
    F.d.resize(N);
    F.dl.resize(N - 1);
    F.du.resize(N - 1);
    F.du2.resize(N > 2 ? N - 2 : 1);
    F.ipiv.resize(N);
    for (std::size_t i = 0; i < N; ++i) F.d[i] = F.D[i] * T.diag[i] * F.D[i];
    for (std::size_t i = 0; i + 1 < N; ++i) {
        F.dl[i] = F.D[i + 1] * T.lower[i] * F.D[i];
        F.du[i] = F.D[i] * T.upper[i] * F.D[i + 1];
    }
    double anorm = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        double col = std::abs(F.d[j]);
        if (j > 0) col += std::abs(F.du[j - 1]);
        if (j + 1 < N) col += std::abs(F.dl[j]);
        anorm = std::max(anorm, col);
    }
    const lapack_int n = static_cast<lapack_int>(N);
    lapack_int info = LAPACKE_zgttrf(n, F.dl.data(), F.d.data(), F.du.data(), F.du2.data(), F.ipiv.data());
    if (info > 0) {
        F.rcond = 0.0;
        if (strict) {
            throw Error(ErrorCode::IllConditioned, "resolvent",
                        "lambda - A is singular on mode " + std::to_string(mode));
        }
        return F;
    }
    info = LAPACKE_zgtcon('1', n, F.dl.data(), F.d.data(), F.du.data(), F.du2.data(), F.ipiv.data(), anorm, &F.rcond);
    if (strict && (info != 0 || F.rcond * kIllConditioned < 1.0)) {
        throw Error(ErrorCode::IllConditioned, "resolvent",
                    "condition estimate above 1e12 on mode " + std::to_string(mode) + ": lambda is close to the spectrum");
    }
    return F;
}

Eigen::VectorXcd unknowns(const Eigen::VectorXcd& nodal, int nodes) {
    if (nodal.size() != nodes) throw Error(ErrorCode::DimensionMismatch, "resolvent", "nodal vector has the wrong length");
    return nodal.head(nodes - 1);
}

Eigen::VectorXcd nodal(const Eigen::VectorXcd& x) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(x.size() + 1);
    out.head(x.size()) = x;
    return out;
}

double weighted_norm(const Eigen::VectorXcd& x, const std::vector<double>& W) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += W[static_cast<std::size_t>(i)] * std::norm(x(i));
    return std::sqrt(acc);
}

void require_part(const DiscreteDomain& dd, std::size_t mode, std::size_t part) {
    if (mode >= dd.modes()) throw Error(ErrorCode::InvalidInput, "resolvent", "mode outside the truncation");
    if (part >= dd.parts[mode].size()) throw Error(ErrorCode::InvalidInput, "resolvent", "eigenspace part out of range");
}

}  // namespace

DiscreteDomain DiscreteDomain::build(const Extension& ext, int nodes, double t_min, double scale) {
    if (!ext.spectrum) throw Error(ErrorCode::InvalidInput, "resolvent", "extension has no spectrum");
    if (nodes < 16) throw Error(ErrorCode::InvalidInput, "resolvent", "at least 16 grid nodes are required");
    if (!(t_min > 0.0 && t_min < 1.0)) throw Error(ErrorCode::InvalidInput, "resolvent", "t_min must lie in (0, 1)");
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidInput, "resolvent", "operator scale must be positive");
    DiscreteDomain dd;
    dd.extension = ext;
    dd.nodes = nodes;
    dd.t_min = t_min;
    dd.scale = scale;
    dd.h = -std::log(t_min) / (nodes - 1);
    dd.s.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) dd.s[static_cast<std::size_t>(i)] = std::log(t_min) + i * dd.h;
    dd.s.back() = 0.0;

    const BoundarySpectrum& S = *ext.spectrum;
    const double hh = (ext.n - 1) / 2.0;
    for (std::size_t j = 0; j < S.size(); ++j) {
        const int m = S.mode(j).multiplicity;
        const double nu = std::sqrt(std::max(0.0, hh * hh - S.mode(j).eigenvalue));
        std::vector<BoundaryPart> parts;
        if (nu < 1e-12) {
            const Status st = status_of(hh, ext);
            if (st != Status::Selected) not_index_zero(j);
            const Selection* s = find_selection(ext, j, 0);
            if (!s) throw Error(ErrorCode::InvalidInput, "resolvent", "extension misses the log pair selection");
            if (s->kind == SelectionKind::Omega) parts.push_back({Behaviour::Constant, Eigen::MatrixXcd::Identity(m, m), m});
            else if (s->kind == SelectionKind::LogOnly) parts.push_back({Behaviour::Log, Eigen::MatrixXcd::Identity(m, m), m});
            else not_index_zero(j);
        } else {
            const Eigen::MatrixXcd Pp = allowed_projector(ext, j, +1, hh + nu, m);
            const Eigen::MatrixXcd Pm = allowed_projector(ext, j, -1, hh - nu, m);
            if ((Pp + Pm - Eigen::MatrixXcd::Identity(m, m)).norm() > 1e-10 || (Pp * Pm).norm() > 1e-10) not_index_zero(j);
            if (rank_of(Pp) > 0) parts.push_back({Behaviour::Plus, Pp, rank_of(Pp)});
            if (rank_of(Pm) > 0) parts.push_back({Behaviour::Minus, Pm, rank_of(Pm)});
        }
        dd.parts.push_back(std::move(parts));
    }
    return dd;
}

std::vector<double> DiscreteDomain::norm_weights() const {
    const int n = extension.n;
    std::vector<double> W(static_cast<std::size_t>(nodes));
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double w = (i == 0 || i + 1 == W.size()) ? h / 2 : h;
        W[i] = w * std::exp((n + 1 - 2 * extension.gamma) * s[i]);
    }
    return W;
}

Eigen::VectorXcd mode_resolvent_solve(const DiscreteDomain& dd, Complex lambda, std::size_t mode, const Eigen::VectorXcd& rhs,
                                      std::size_t part, double* residual) {
    require_part(dd, mode, part);
    const Tridiag T = assemble(dd, lambda, mode, part);
    const Factor F = factorise(T, mode);
    const auto mass = mass_diagonal(dd);
    Eigen::VectorXcd b = unknowns(rhs, dd.nodes);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) *= mass[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd x = F.solve(b);
    if (residual) {
        const double nb = b.norm();
        *residual = nb == 0.0 ? 0.0 : (multiply(T, x) - b).norm() / nb;
    }
    return nodal(x);
}

Eigen::VectorXcd mode_apply(const DiscreteDomain& dd, Complex lambda, std::size_t mode, const Eigen::VectorXcd& u,
                            std::size_t part) {
    require_part(dd, mode, part);
    const Tridiag T = assemble(dd, lambda, mode, part);
    const auto mass = mass_diagonal(dd);
    Eigen::VectorXcd y = multiply(T, unknowns(u, dd.nodes));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) /= mass[static_cast<std::size_t>(i)];
    return nodal(y);
}

namespace {

// fits u on rows [0, k) by the columns of B; returns the size of column 1's share relative to max |u|
double excluded_share(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& u, Complex* allowed, Complex* excluded) {
    const double umax = u.cwiseAbs().maxCoeff();
    if (umax == 0.0) return 0.0;
    Eigen::Vector2d cs(B.col(0).norm(), B.col(1).norm());
    Eigen::MatrixXcd Bs = B;
    Bs.col(0) /= cs(0);
    Bs.col(1) /= cs(1);
    const Eigen::VectorXcd c = Bs.colPivHouseholderQr().solve(u);
    *allowed = c(0) / cs(0);
    *excluded = c(1) / cs(1);
    return (B.col(1) * *excluded).cwiseAbs().maxCoeff() / umax;
}

DomainDiagnostic diagnose(const DiscreteDomain& dd, Complex lambda, std::size_t mode, std::size_t part, const Eigen::VectorXcd& u) {
    DomainDiagnostic d;
    d.mode = mode;
    d.part = part;
    d.behaviour = dd.parts[mode][part].behaviour;
    const double hh = (dd.extension.n - 1) / 2.0;
    const double nu = nu_of(dd, mode);
    d.q_plus = hh + nu;
    d.q_minus = hh - nu;
    const double s_end = dd.s.front() + std::log(10.0);
    Eigen::Index k = 0;
    while (k + 1 < static_cast<Eigen::Index>(dd.s.size()) && dd.s[static_cast<std::size_t>(k)] <= s_end + 1e-12) ++k;
    k = std::max<Eigen::Index>(k, 3);
    const bool log_case = nu < 1e-12;
    Behaviour excluded_b;
    if (log_case) excluded_b = d.behaviour == Behaviour::Log ? Behaviour::Constant : Behaviour::Log;
    else excluded_b = d.behaviour == Behaviour::Plus ? Behaviour::Minus : Behaviour::Plus;

    // continuum powers
    auto power = [&](double s, Behaviour b) -> Complex {
        const double t = std::exp(s);
        switch (b) {
            case Behaviour::Plus: return std::pow(t, -(hh + nu));
            case Behaviour::Minus: return std::pow(t, -(hh - nu));
            case Behaviour::Constant: return std::pow(t, -hh);
            case Behaviour::Log: return std::pow(t, -hh) * s;
        }
        return 0.0;
    };
    Eigen::MatrixXcd C(k, 2);
    for (Eigen::Index i = 0; i < k; ++i) {
        C(i, 0) = power(dd.s[static_cast<std::size_t>(i)], d.behaviour);
        C(i, 1) = power(dd.s[static_cast<std::size_t>(i)], excluded_b);
    }
    const Eigen::VectorXcd uk = u.head(k);
    Complex a, b;
    d.continuum_excluded_relative = excluded_share(C, uk, &a, &b);

    // discrete branches: start at the first node, close the half cell with the
    // branch's own Robin coefficient, then run the homogeneous recurrence
    DiscreteDomain probe = dd;
    auto branch = [&](Behaviour beh) {
        probe.parts[mode][part].behaviour = beh;
        const Tridiag T = assemble(probe, lambda, mode, part);
        Eigen::VectorXcd v(k);
        v(0) = power(dd.s.front(), beh);
        v(1) = -T.diag[0] * v(0) / T.upper[0];
        for (Eigen::Index i = 1; i + 1 < k; ++i) {
            const std::size_t r = static_cast<std::size_t>(i);
            v(i + 1) = -(T.lower[r - 1] * v(i - 1) + T.diag[r] * v(i)) / T.upper[r];
        }
        return v;
    };
    Eigen::MatrixXcd D(k, 2);
    D.col(0) = branch(d.behaviour);
    D.col(1) = branch(excluded_b);
    d.excluded_relative = excluded_share(D, uk, &d.coeff_allowed, &d.coeff_excluded);
    d.ok = d.excluded_relative <= 1e-6;
    return d;
}

Eigen::VectorXcd sample_profile(const DiscreteDomain& dd, const RadialFunction& f) {
    Eigen::VectorXcd v(dd.nodes);
    for (int i = 0; i < dd.nodes; ++i) v(i) = f(std::exp(dd.s[static_cast<std::size_t>(i)]));
    return v;
}

Eigen::VectorXcd component_of(const DiscreteDomain& dd, const ModeInput& in) {
    const int m = dd.extension.spectrum->mode(in.mode).multiplicity;
    if (in.component.size() == 0) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
        e(0) = 1.0;
        return e;
    }
    if (in.component.size() != m) throw Error(ErrorCode::DimensionMismatch, "resolvent", "component length differs from multiplicity");
    return in.component;
}

}  // namespace

ResolventResult resolvent_apply(const DiscreteDomain& dd, Complex lambda, const std::vector<ModeInput>& f) {
    ResolventResult res;
    res.lambda = lambda;
    std::vector<bool> seen(dd.modes(), false);
    for (const auto& in : f) {
        if (in.mode >= dd.modes()) throw Error(ErrorCode::InvalidInput, "resolvent", "forcing mode outside the truncation");
        if (seen[in.mode]) throw Error(ErrorCode::InvalidInput, "resolvent", "at most one forcing term per mode");
        seen[in.mode] = true;
    }
    struct Job {
        std::size_t input, part;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t p = 0; p < dd.parts[f[i].mode].size(); ++p) jobs.push_back({i, p});
    const auto W = dd.norm_weights();
    std::vector<ModeSolution> sols(jobs.size());
    std::vector<double> resid(jobs.size()), nu2(jobs.size()), nf2(jobs.size());
    std::vector<DomainDiagnostic> diags(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        const ModeInput& in = f[jobs[k].input];
        const BoundaryPart& bp = dd.parts[in.mode][jobs[k].part];
        const Eigen::VectorXcd e = bp.projector * component_of(dd, in);
        const Eigen::VectorXcd rhs = sample_profile(dd, in.profile);
        double r = 0.0;
        Eigen::VectorXcd u = mode_resolvent_solve(dd, lambda, in.mode, rhs, jobs[k].part, &r);
        sols[k] = {in.mode, jobs[k].part, e, u};
        resid[k] = r;
        const double en = e.squaredNorm();
        nu2[k] = en * std::pow(weighted_norm(u, W), 2);
        nf2[k] = en * std::pow(weighted_norm(rhs, W), 2);
        diags[k] = diagnose(dd, lambda, in.mode, jobs[k].part, u);
    });
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        res.residual = std::max(res.residual, resid[k]);
        a += nu2[k];
        b += nf2[k];
    }
    res.norm_u = std::sqrt(a);
    res.norm_f = std::sqrt(b);
    res.solutions = std::move(sols);
    res.diagnostics = std::move(diags);
    return res;
}

NormEstimate resolvent_norm(const DiscreteDomain& dd, Complex lambda, int iterations, std::uint64_t seed) {
    struct Job {
        std::size_t mode, part;
    };
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < dd.modes(); ++j)
        for (std::size_t p = 0; p < dd.parts[j].size(); ++p) jobs.push_back({j, p});
    const auto Wn = dd.norm_weights();
    const std::vector<double> W(Wn.begin(), Wn.end() - 1);
    const auto mass = mass_diagonal(dd);
    std::vector<double> norms(jobs.size()), resid(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        const Tridiag T = assemble(dd, lambda, jobs[k].mode, jobs[k].part);
        const Factor F = factorise(T, jobs[k].mode);
        const Eigen::Index N = static_cast<Eigen::Index>(mass.size());
        std::mt19937_64 rng(seed + k);
        std::normal_distribution<double> nd;
        Eigen::VectorXcd v(N);
        for (Eigen::Index i = 0; i < N; ++i) v(i) = Complex(nd(rng), nd(rng));
        double worst = 0.0;
        auto R = [&](const Eigen::VectorXcd& x) {
            Eigen::VectorXcd b(N);
            for (Eigen::Index i = 0; i < N; ++i) b(i) = mass[static_cast<std::size_t>(i)] * x(i);
            Eigen::VectorXcd y = F.solve(b);
            const double nb = b.norm();
            if (nb > 0.0) worst = std::max(worst, (multiply(T, y) - b).norm() / nb);
            return y;
        };
        // R^* = W^{-1} Mass M^{-H} W in the weighted inner product
        auto Rstar = [&](const Eigen::VectorXcd& x) {
            Eigen::VectorXcd b(N);
            for (Eigen::Index i = 0; i < N; ++i) b(i) = W[static_cast<std::size_t>(i)] * x(i);
            Eigen::VectorXcd y = F.solve(b, 'C');
            for (Eigen::Index i = 0; i < N; ++i) y(i) *= mass[static_cast<std::size_t>(i)] / W[static_cast<std::size_t>(i)];
            return y;
        };
        v /= weighted_norm(v, W);
        double est = 0.0;
        for (int it = 0; it < iterations; ++it) {
            Eigen::VectorXcd y = Rstar(R(v));
            const double ny = weighted_norm(y, W);
            if (ny == 0.0) break;
            v = y / ny;
            est = weighted_norm(R(v), W);
        }
        norms[k] = est;
        resid[k] = worst;
    });
    NormEstimate out;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (norms[k] > out.norm) {
            out.norm = norms[k];
            out.mode = jobs[k].mode;
        }
        out.residual = std::max(out.residual, resid[k]);
    }
    return out;
}

DecayFit norm_decay_fit(const DiscreteDomain& dd, double arg, const std::vector<double>& magnitudes) {
    std::vector<double> mags;
    for (double m : magnitudes)
        if (std::find(mags.begin(), mags.end(), m) == mags.end()) mags.push_back(m);
    if (mags.size() < 2) throw Error(ErrorCode::SlopeUndefined, "resolvent", "a slope needs at least two distinct magnitudes");
    for (double m : mags)
        if (!(m > 0.0)) throw Error(ErrorCode::InvalidInput, "resolvent", "magnitudes must be positive");
    DecayFit fit;
    fit.magnitudes = mags;
    for (double m : mags) {
        const NormEstimate e = resolvent_norm(dd, std::polar(m, arg));
        fit.norms.push_back(e.norm);
        fit.residuals.push_back(e.residual);
    }
    const double n = static_cast<double>(mags.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        const double x = std::log(mags[i]), y = std::log(fit.norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    std::vector<std::size_t> order(mags.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
    const std::size_t a = order[order.size() - 2], b = order.back();
    fit.tail_slope = (std::log(fit.norms[b]) - std::log(fit.norms[a])) / (std::log(mags[b]) - std::log(mags[a]));
    return fit;
}

namespace {

// number of eigenvalues of A below lambda: positive pivots of lambda Mass + c K
int eigen_count(const DiscreteDomain& dd, double lambda, std::size_t mode, std::size_t part) {
    const Tridiag T = assemble(dd, lambda, mode, part);
    int count = 0;
    double d = 0.0;
    for (std::size_t i = 0; i < T.diag.size(); ++i) {
        d = T.diag[i].real() - (i == 0 ? 0.0 : std::norm(T.lower[i - 1]) / d);
        if (d == 0.0) d = -1e-300;
        if (d > 0.0) ++count;
    }
    return count;
}

// smallest eigenvalue of A over all modes and parts
double first_eigenvalue(const DiscreteDomain& dd) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dd.modes(); ++j) {
        for (std::size_t p = 0; p < dd.parts[j].size(); ++p) {
            double lo = -1e6, hi = 1.0;
            if (eigen_count(dd, lo, j, p) > 0) return lo;
            while (eigen_count(dd, hi, j, p) == 0 && hi < 1e12) hi *= 4.0;
            if (hi >= best) continue;
            while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                if (eigen_count(dd, mid, j, p) >= 1) hi = mid;
                else lo = mid;
            }
            best = std::min(best, 0.5 * (lo + hi));
        }
    }
    return best;
}

}  // namespace

std::vector<SpectralPoint> detect_spectrum(const DiscreteDomain& dd, double a, double b, double tol) {
    std::vector<SpectralPoint> out;
    if (!(a < b)) return out;
    if (dd.extension.gamma != 0.0 || dd.extension.p != 2.0 || !is_selfadjoint(dd.extension)) {
        throw Error(ErrorCode::PreconditionViolated, "resolvent", "spectrum detection needs a selfadjoint extension");
    }
    struct Job {
        std::size_t mode, part;
    };
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < dd.modes(); ++j)
        for (std::size_t p = 0; p < dd.parts[j].size(); ++p) jobs.push_back({j, p});
    std::vector<std::vector<SpectralPoint>> found(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        const std::size_t j = jobs[k].mode, p = jobs[k].part;
        const int ca = eigen_count(dd, a, j, p), cb = eigen_count(dd, b, j, p);
        for (int idx = ca + 1; idx <= cb; ++idx) {
            double lo = a, hi = b;
            while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                if (eigen_count(dd, mid, j, p) >= idx) hi = mid;
                else lo = mid;
            }
            SpectralPoint sp;
            sp.value = 0.5 * (lo + hi);
            sp.mode = j;
            sp.part = p;
            sp.multiplicity = dd.parts[j][p].dimension;
            sp.rcond = factorise(assemble(dd, sp.value, j, p), j, false).rcond;
            found[k].push_back(sp);
        }
    });
    for (auto& v : found)
        for (auto& sp : v) out.push_back(sp);
    std::stable_sort(out.begin(), out.end(), [](const SpectralPoint& x, const SpectralPoint& y) { return x.value < y.value; });
    return out;
}

std::vector<HeatForcing> heat_forcing_battery(std::size_t modes) {
    const auto bump = RadialFunction::bump(0.1, 0.9);
    std::vector<HeatForcing> all{
        {"zero", [](double) { return 0.0; }, {{0, {}, bump}}},
        {"constant", [](double) { return 1.0; }, {{0, {}, bump}}},
        {"oscillating", [](double t) { return std::sin(6.0 * t); }, {{0, {}, bump}, {1, {}, bump}}},
        {"switched", [](double t) { return t < 1.0 ? 1.0 : 0.0; }, {{1, {}, bump}, {2, {}, RadialFunction::bump(0.3, 0.7)}}},
        {"ramp", [](double t) { return t; }, {{0, {}, RadialFunction::indicator(0.2, 0.6)}}},
    };
    std::vector<HeatForcing> kept;
    for (auto& f : all) {
        std::erase_if(f.space, [&](const ModeInput& in) { return in.mode >= modes; });
        if (!f.space.empty()) kept.push_back(std::move(f));
    }
    return kept;
}

HeatReport heat_solve(const DiscreteDomain& dd, const std::vector<HeatForcing>& battery, double T, int steps, double q,
                      HeatScheme scheme) {
    if (!(T > 0.0) || steps < 1 || !(q >= 1.0)) throw Error(ErrorCode::InvalidInput, "resolvent", "need T > 0, steps >= 1, q >= 1");
    const Sector half_plane(std::numbers::pi / 2);
    if (!check_E2(dd.extension).pass || check_E3_rule(dd.extension, half_plane).verdict != Verdict::Pass) {
        throw Error(ErrorCode::PreconditionViolated, "resolvent",
                    "the heat problem needs an extension satisfying (E1)-(E3) at theta = pi/2");
    }
    HeatReport rep;
    rep.scheme = scheme;
    rep.T = T;
    rep.steps = steps;
    rep.q = q;
    const double dt = T / steps;
    const Complex lambda = scheme == HeatScheme::ImplicitEuler ? -1.0 / dt : -2.0 / dt;
    const auto mass = mass_diagonal(dd);
    const auto Wn = dd.norm_weights();

    // factorisations shared by all forcings
    struct Job {
        std::size_t mode, part;
    };
    std::vector<Job> jobs;
    for (std::size_t j = 0; j < dd.modes(); ++j)
        for (std::size_t p = 0; p < dd.parts[j].size(); ++p) jobs.push_back({j, p});
    std::vector<Tridiag> mats(jobs.size());
    std::vector<Factor> facs(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        mats[k] = assemble(dd, lambda, jobs[k].mode, jobs[k].part);
        facs[k] = factorise(mats[k], jobs[k].mode);
    });
    auto job_index = [&](std::size_t mode, std::size_t part) {
        for (std::size_t k = 0; k < jobs.size(); ++k)
            if (jobs[k].mode == mode && jobs[k].part == part) return k;
        return jobs.size();
    };

    for (const auto& forcing : battery) {
        HeatTrajectory tr;
        tr.forcing = forcing.name;
        // every (input, part) evolves independently; the norms combine orthogonally
        struct Track {
            std::size_t mode, part, job;
            double weight;  // |P e|^2
            Eigen::VectorXcd component;
            Eigen::VectorXcd profile;
            Eigen::VectorXcd u;
        };
        std::vector<Track> tracks;
        for (const auto& in : forcing.space) {
            if (in.mode >= dd.modes()) throw Error(ErrorCode::InvalidInput, "resolvent", "forcing mode outside the truncation");
            for (std::size_t p = 0; p < dd.parts[in.mode].size(); ++p) {
                const Eigen::VectorXcd e = dd.parts[in.mode][p].projector * component_of(dd, in);
                Eigen::VectorXcd prof = sample_profile(dd, in.profile).head(dd.nodes - 1);
                tracks.push_back({in.mode, p, job_index(in.mode, p), e.squaredNorm(), e, prof,
                                  Eigen::VectorXcd::Zero(dd.nodes - 1)});
            }
        }
        auto norm_sq = [&](auto get) {
            double acc = 0.0;
            for (const auto& t : tracks) acc += t.weight * std::pow(weighted_norm(get(t), Wn), 2);
            return acc;
        };
        double du_q = 0.0, f_q = 0.0;
        tr.times.push_back(0.0);
        tr.norms.push_back(0.0);
        for (int k = 0; k < steps; ++k) {
            const double t0 = k * dt, t1 = (k + 1) * dt;
            const double g0 = forcing.time(t0), g1 = forcing.time(t1);
            const double gf = scheme == HeatScheme::ImplicitEuler ? g1 : 0.5 * (g0 + g1);
            std::vector<Eigen::VectorXcd> next(tracks.size());
            parallel_for(tracks.size(), [&](std::size_t i) {
                const Track& t = tracks[i];
                const Eigen::Index N = t.u.size();
                Eigen::VectorXcd b(N);
                if (scheme == HeatScheme::ImplicitEuler) {
                    // (1/dt + A) u1 = u0/dt + f1
                    for (Eigen::Index r = 0; r < N; ++r)
                        b(r) = -mass[static_cast<std::size_t>(r)] * (t.u(r) / dt + g1 * t.profile(r));
                } else {
                    // (2/dt + A) u1 = (2/dt - A) u0 + f0 + f1, with c K = M(lambda) - lambda Mass
                    const Eigen::VectorXcd Mu = multiply(mats[t.job], t.u);
                    for (Eigen::Index r = 0; r < N; ++r) {
                        const double m = mass[static_cast<std::size_t>(r)];
                        const Complex cKu = Mu(r) - lambda * m * t.u(r);
                        b(r) = -(2.0 / dt * m * t.u(r) + cKu + m * (g0 + g1) * t.profile(r));
                    }
                }
                next[i] = facs[t.job].solve(b);
            });
            double du2 = 0.0, f2 = 0.0;
            for (std::size_t i = 0; i < tracks.size(); ++i) {
                const Eigen::VectorXcd du = (next[i] - tracks[i].u) / dt;
                du2 += tracks[i].weight * std::pow(weighted_norm(du, Wn), 2);
                f2 += tracks[i].weight * std::pow(std::abs(gf) * weighted_norm(tracks[i].profile, Wn), 2);
                tracks[i].u = next[i];
            }
            du_q += dt * std::pow(std::sqrt(du2), q);
            f_q += dt * std::pow(std::sqrt(f2), q);
            tr.times.push_back(t1);
            tr.norms.push_back(std::sqrt(norm_sq([](const Track& t) { return t.u; })));
        }
        tr.ratio = f_q == 0.0 ? 0.0 : std::pow(du_q / f_q, 1.0 / q);
        tr.final_state.lambda = 0.0;
        for (const auto& t : tracks) tr.final_state.solutions.push_back({t.mode, t.part, t.component, nodal(t.u)});
        tr.final_state.norm_u = tr.norms.back();
        rep.max_ratio = std::max(rep.max_ratio, tr.ratio);
        rep.trajectories.push_back(std::move(tr));
    }
    // single-mode oracle: u' + mu u = f gives ||u'||_q <= (1 + (1 - e^{-mu T})) ||f||_q
    const double mu1 = first_eigenvalue(dd);
    rep.first_eigenvalue = mu1;
    rep.oracle_bound = 1.0 + (1.0 - std::exp(-mu1 * T));
    return rep;
}

}  // namespace conelab
