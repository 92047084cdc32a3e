#include "conelab/mellin_green.hpp"
#include "conelab/cutoff.hpp"
#include "conelab/error.hpp"
#include "conelab/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace conelab {

namespace {

double bump_profile(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

double base_value(const RadialFunction& u, double t) {
    switch (u.base) {
        case RadialFunction::Base::None: return 0.0;
        case RadialFunction::Base::Bump: {
            if (t <= u.a || t >= u.b) return 0.0;
            const double sa = std::log(u.a), sb = std::log(u.b);
            return bump_profile((2.0 * std::log(t) - sa - sb) / (sb - sa));
        }
        case RadialFunction::Base::Indicator: return (t >= u.a && t <= u.b) ? 1.0 : 0.0;
        case RadialFunction::Base::Cutoff: return cutoff(t);
        case RadialFunction::Base::Samples: return 1.0;
    }
    return 0.0;
}

Complex sample_value(const RadialFunction& u, double t) {
    if (u.t.empty() || t < u.t.front() || t > u.t.back()) return 0.0;
    auto it = std::upper_bound(u.t.begin(), u.t.end(), t);
    if (it == u.t.end()) return u.values.back();
    const std::size_t i = static_cast<std::size_t>(it - u.t.begin()) - 1;
    const double s0 = std::log(u.t[i]), s1 = std::log(u.t[i + 1]);
    const double w = (std::log(t) - s0) / (s1 - s0);
    return (1.0 - w) * u.values[i] + w * u.values[i + 1];
}

template <class F>
Complex integrate(F f, double a, double b, const MellinOptions& opts, bool adaptive = true) {
    using boost::math::quadrature::gauss_kronrod;
    double e1 = 0.0, e2 = 0.0;
    const unsigned depth = adaptive ? opts.max_depth : 0;
    const double re = gauss_kronrod<double, 61>::integrate([&](double s) { return f(s).real(); }, a, b, depth, opts.tolerance, &e1);
    const double im = gauss_kronrod<double, 61>::integrate([&](double s) { return f(s).imag(); }, a, b, depth, opts.tolerance, &e2);
    if (!std::isfinite(re) || !std::isfinite(im)) {
        throw Error(ErrorCode::QuadratureFailure, "mellin_green", "Mellin quadrature produced a non-finite value");
    }
    const double mag = std::max(1.0, std::hypot(re, im));
    if (adaptive && std::max(e1, e2) > 1e-6 * mag) {
        throw Error(ErrorCode::QuadratureFailure, "mellin_green", "Mellin quadrature did not converge");
    }
    return {re, im};
}

// int_0^c t^{w-1} log^k t dt for Re w > 0
Complex power_log_head(Complex w, int k, double c) {
    const double L = std::log(c);
    const Complex cw = std::exp(w * L);
    std::vector<Complex> I(static_cast<std::size_t>(k + 1));
    for (int j = 0; j <= k; ++j) {
        I[static_cast<std::size_t>(j)] = cw * std::pow(L, j) / w;
        if (j > 0) I[static_cast<std::size_t>(j)] -= double(j) / w * I[static_cast<std::size_t>(j - 1)];
    }
    return I[static_cast<std::size_t>(k)];
}

void check_pole_lines(const std::vector<ModeMeromorphic>& g, int n, double gamma1, double gamma2) {
    const double right = (n + 1) / 2.0 - gamma1;
    const double left = (n + 1) / 2.0 - gamma2;
    for (const auto& gm : g)
        for (const auto& p : gm.poles())
            if (std::abs(p.value.real() - right) < 1e-9 || std::abs(p.value.real() - left) < 1e-9) {
                throw Error(ErrorCode::PoleOnLine, "mellin_green", "a pole of the symbol lies on a weight line");
            }
}

}  // namespace

RadialFunction RadialFunction::bump(double a, double b) {
    if (!(a > 0.0 && b > a)) throw Error(ErrorCode::InvalidInput, "mellin_green", "bump support must satisfy 0 < a < b");
    RadialFunction u;
    u.base = Base::Bump;
    u.a = a;
    u.b = b;
    return u;
}

RadialFunction RadialFunction::indicator(double a, double b) {
    if (!(a > 0.0 && b > a)) throw Error(ErrorCode::InvalidInput, "mellin_green", "indicator support must satisfy 0 < a < b");
    RadialFunction u;
    u.base = Base::Indicator;
    u.a = a;
    u.b = b;
    return u;
}

RadialFunction RadialFunction::cutoff() {
    RadialFunction u;
    u.base = Base::Cutoff;
    u.a = 0.0;
    u.b = kCutoffOuter;
    return u;
}

RadialFunction RadialFunction::samples(std::vector<double> t, std::vector<Complex> values) {
    if (t.size() < 2 || t.size() != values.size()) {
        throw Error(ErrorCode::InvalidInput, "mellin_green", "sampled function needs at least two matching points");
    }
    if (!(t.front() > 0.0)) throw Error(ErrorCode::InvalidInput, "mellin_green", "sample grid must be positive");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw Error(ErrorCode::InvalidInput, "mellin_green", "sample grid must be strictly increasing");
    RadialFunction u;
    u.base = Base::Samples;
    u.a = t.front();
    u.b = t.back();
    u.t = std::move(t);
    u.values = std::move(values);
    return u;
}

RadialFunction RadialFunction::times_power(Complex sigma) const {
    RadialFunction u = *this;
    u.power += sigma;
    return u;
}

RadialFunction RadialFunction::times_log(int k) const {
    RadialFunction u = *this;
    u.log_power += k;
    return u;
}

RadialFunction RadialFunction::scaled(Complex c) const {
    RadialFunction u = *this;
    u.scale *= c;
    return u;
}

Complex RadialFunction::operator()(double tt) const {
    if (is_zero() || !(tt > 0.0)) return 0.0;
    Complex v = base == Base::Samples ? sample_value(*this, tt) : Complex(base_value(*this, tt));
    if (v == Complex(0.0)) return 0.0;
    const double L = std::log(tt);
    if (power != Complex(0.0)) v *= std::exp(power * L);
    if (log_power != 0) v *= std::pow(L, log_power);
    return scale * v;
}

std::string to_string(RadialFunction::Base b) {
    switch (b) {
        case RadialFunction::Base::None: return "zero";
        case RadialFunction::Base::Samples: return "samples";
        case RadialFunction::Base::Bump: return "bump";
        case RadialFunction::Base::Indicator: return "indicator";
        case RadialFunction::Base::Cutoff: return "cutoff";
    }
    return "zero";
}

std::string RadialFunction::describe() const {
    std::ostringstream os;
    os << to_string(base);
    if (base == Base::Bump || base == Base::Indicator || base == Base::Samples) os << "[" << a << "," << b << "]";
    if (power != Complex(0.0)) os << "*t^(" << power.real() << (power.imag() >= 0 ? "+" : "") << power.imag() << "i)";
    if (log_power != 0) os << "*log^" << log_power;
    return os.str();
}

Complex mellin_transform(const RadialFunction& u, Complex z, int k, const MellinOptions& opts) {
    if (k < 0) throw Error(ErrorCode::InvalidInput, "mellin_green", "derivative order must be non-negative");
    if (u.is_zero()) return 0.0;
    const int K = k + u.log_power;
    const Complex w = z + u.power;
    // integrand in s = log t: e^{w s} s^K base(e^s)
    auto kernel = [&](double s, Complex base) { return std::exp(w * s) * std::pow(s, K) * base; };
    Complex acc = 0.0;
    switch (u.base) {
        case RadialFunction::Base::None: return 0.0;
        case RadialFunction::Base::Samples: {
            for (std::size_t i = 0; i + 1 < u.t.size(); ++i) {
                const double s0 = std::log(u.t[i]), s1 = std::log(u.t[i + 1]);
                const Complex v0 = u.values[i], v1 = u.values[i + 1];
                acc += integrate([&](double s) { return kernel(s, v0 + (v1 - v0) * ((s - s0) / (s1 - s0))); }, s0, s1, opts,
                                 false);
            }
            break;
        }
        case RadialFunction::Base::Bump:
        case RadialFunction::Base::Indicator: {
            const double sa = std::log(u.a), sb = std::log(u.b);
            const bool flat = u.base == RadialFunction::Base::Indicator;
            acc = integrate([&](double s) { return kernel(s, flat ? 1.0 : base_value(u, std::exp(s))); }, sa, sb, opts);
            break;
        }
        case RadialFunction::Base::Cutoff: {
            if (!(w.real() > 0.0)) {
                throw Error(ErrorCode::QuadratureFailure, "mellin_green", "Mellin integral of the cut-off diverges at t = 0");
            }
            acc = power_log_head(w, K, kCutoffInner);
            acc += integrate([&](double s) { return kernel(s, cutoff(std::exp(s))); }, std::log(kCutoffInner),
                             std::log(kCutoffOuter), opts);
            break;
        }
    }
    return u.scale * acc;
}

Complex GreenAction::value(std::size_t mode, double t) const {
    const double w = cutoff(t);
    if (w == 0.0) return 0.0;
    const double L = std::log(t);
    Complex acc = 0.0;
    for (const auto& term : terms) {
        if (term.mode != mode) continue;
        acc += term.zeta * std::exp(-term.pole * L) * std::pow(L, term.log_power);
    }
    return w * acc;
}

GreenAction green_action(const std::vector<ModeMeromorphic>& g, int n, double gamma1, double gamma2,
                         const std::vector<RadialFunction>& u, const MellinOptions& opts) {
    if (!(gamma1 < gamma2)) throw Error(ErrorCode::InvalidInput, "mellin_green", "weights must satisfy gamma1 < gamma2");
    if (g.size() != u.size()) throw Error(ErrorCode::DimensionMismatch, "mellin_green", "one input function per mode is required");
    check_pole_lines(g, n, gamma1, gamma2);
    const double right = (n + 1) / 2.0 - gamma1;
    const double left = (n + 1) / 2.0 - gamma2;

    struct Job {
        std::size_t index;
        const Pole* pole;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& p : g[i].poles())
            if (p.value.real() > left && p.value.real() < right) jobs.push_back({i, &p});

    std::vector<std::vector<GreenTerm>> parts(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const Pole& p = *jobs[j].pole;
        const RadialFunction& f = u[jobs[j].index];
        const int np = p.order - 1;
        std::vector<Complex> dM(static_cast<std::size_t>(np + 1));
        for (int k = 0; k <= np; ++k) dM[static_cast<std::size_t>(k)] = mellin_transform(f, p.value, k, opts);
        for (int l = 0; l <= np; ++l) {
            Complex zeta = 0.0;
            double lf = std::tgamma(l + 1.0);
            for (int k = l; k <= np; ++k) {
                const double c = (l % 2 ? -1.0 : 1.0) / (lf * std::tgamma(k - l + 1.0));
                const Complex R = static_cast<std::size_t>(k) < p.laurent.size() ? p.laurent[static_cast<std::size_t>(k)] : 0.0;
                zeta += c * R * dM[static_cast<std::size_t>(k - l)];
            }
            parts[j].push_back({g[jobs[j].index].mode(), p.value, p.exact, l, zeta});
        }
    });
    GreenAction a;
    a.n = n;
    a.gamma1 = gamma1;
    a.gamma2 = gamma2;
    for (auto& p : parts)
        for (auto& t : p) a.terms.push_back(std::move(t));
    return a;
}

std::vector<std::vector<Complex>> green_action_contour_oracle(const std::vector<ModeMeromorphic>& g, int n, double gamma1,
                                                              double gamma2, const std::vector<RadialFunction>& u,
                                                              const std::vector<double>& t_samples, const ContourOptions& opts) {
    if (!(gamma1 < gamma2)) throw Error(ErrorCode::InvalidInput, "mellin_green", "weights must satisfy gamma1 < gamma2");
    if (g.size() != u.size()) throw Error(ErrorCode::DimensionMismatch, "mellin_green", "one input function per mode is required");
    if (opts.nodes_per_side < 2048) throw Error(ErrorCode::InvalidInput, "mellin_green", "contour needs at least 2048 nodes per side");
    check_pole_lines(g, n, gamma1, gamma2);
    const double right = (n + 1) / 2.0 - gamma1;
    const double left = (n + 1) / 2.0 - gamma2;
    double hmax = 0.0;
    for (const auto& gm : g)
        for (const auto& p : gm.poles())
            if (p.value.real() > left && p.value.real() < right) hmax = std::max(hmax, std::abs(p.value.imag()));
    const double H = hmax + 1.0;

    // counter-clockwise corners
    const Complex corners[4] = {{left, -H}, {right, -H}, {right, H}, {left, H}};
    const int N = opts.nodes_per_side;
    // sin^3 transform: v in [0,1] -> psi(v), psi'(v) = (3 pi / 4) sin^3(pi v); endpoint weights vanish
    struct Node {
        Complex z;
        Complex dz;  // weight including the trapezoid step and the transform Jacobian
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(4 * N));
    for (int side = 0; side < 4; ++side) {
        const Complex a = corners[side], b = corners[(side + 1) % 4];
        for (int i = 1; i < N; ++i) {
            const double v = double(i) / N;
            const double c = std::cos(std::numbers::pi * v);
            const double psi = 0.5 - 0.75 * c + 0.25 * c * c * c;
            const double dpsi = 0.75 * std::numbers::pi * std::pow(std::sin(std::numbers::pi * v), 3);
            nodes.push_back({a + (b - a) * psi, (b - a) * dpsi / double(N)});
        }
    }
    std::vector<std::vector<Complex>> out(g.size(), std::vector<Complex>(t_samples.size(), 0.0));
    for (std::size_t m = 0; m < g.size(); ++m) {
        if (u[m].is_zero()) continue;
        std::vector<Complex> integrand(nodes.size());
        parallel_for(nodes.size(), [&](std::size_t i) {
            integrand[i] = g[m](nodes[i].z) * mellin_transform(u[m], nodes[i].z, 0, opts.mellin) * nodes[i].dz;
        });
        for (std::size_t k = 0; k < t_samples.size(); ++k) {
            const double L = std::log(t_samples[k]);
            Complex acc = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) acc += std::exp(-nodes[i].z * L) * integrand[i];
            const Complex v = cutoff(t_samples[k]) * acc / Complex(0.0, 2.0 * std::numbers::pi);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw Error(ErrorCode::QuadratureFailure, "mellin_green", "contour quadrature produced a non-finite value");
            }
            out[m][k] = v;
        }
    }
    return out;
}

std::pair<GreenAction, GreenAction> green_split(const std::vector<ModeMeromorphic>& g, int n, double gamma1, double gamma,
                                                double gamma2, const std::vector<RadialFunction>& u, const MellinOptions& opts) {
    if (!(gamma1 < gamma && gamma < gamma2)) {
        throw Error(ErrorCode::InvalidInput, "mellin_green", "split weight must lie strictly between gamma1 and gamma2");
    }
    check_pole_lines(g, n, gamma, gamma);
    return {green_action(g, n, gamma1, gamma, u, opts), green_action(g, n, gamma, gamma2, u, opts)};
}

}  // namespace conelab
