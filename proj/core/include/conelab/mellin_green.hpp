#pragma once

#include "conelab/meromorphic.hpp"
#include "conelab/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conelab {

// u(t) = scale * base(t) * t^power * log^log_power t on one boundary mode.
// Bump, Indicator and Cutoff bases evaluate analytically; Samples interpolate
// linearly in s = log t on a strictly increasing grid and vanish outside it.
struct RadialFunction {
    enum class Base { None, Samples, Bump, Indicator, Cutoff };

    Base base = Base::None;
    double a = 1.0;  // support [a, b] for Bump and Indicator
    double b = 2.0;
    std::vector<double> t;
    std::vector<Complex> values;
    Complex power{0.0};
    int log_power = 0;
    Complex scale{1.0};

    static RadialFunction zero() { return {}; }
    static RadialFunction bump(double a, double b);
    static RadialFunction indicator(double a, double b);
    static RadialFunction cutoff();
    static RadialFunction samples(std::vector<double> t, std::vector<Complex> values);
    // Samples of f on n log-spaced points in [a, b].
    template <class F>
    static RadialFunction sampled(F f, double a, double b, int n);

    RadialFunction times_power(Complex sigma) const;
    RadialFunction times_log(int k) const;
    RadialFunction scaled(Complex c) const;

    bool is_zero() const { return base == Base::None || scale == Complex(0.0); }
    bool exact_tag() const { return base == Base::Bump || base == Base::Indicator || base == Base::Cutoff; }
    Complex operator()(double t) const;
    std::string describe() const;
};

std::string to_string(RadialFunction::Base b);

struct MellinOptions {
    double tolerance = 1e-13;
    unsigned max_depth = 10;
};

// d^k/dz^k of (Mu)(z) = int_0^inf t^{z-1} u(t) dt, by quadrature in s = log t.
Complex mellin_transform(const RadialFunction& u, Complex z, int k = 0, const MellinOptions& opts = {});

struct GreenTerm {
    std::size_t mode = 0;
    Complex pole;
    std::optional<Rational> pole_exact;
    int log_power = 0;
    Complex zeta;  // coefficient of omega(t) t^{-p} log^l t
};

// G = omega (op^{gamma1 - n/2}(g) - op^{gamma2 - n/2}(g)) applied to u, as
// the finite list of its generators.
struct GreenAction {
    int n = 0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::vector<GreenTerm> terms;

    Complex value(std::size_t mode, double t) const;
    std::size_t rank() const { return terms.size(); }
};

// g[i] and u[i] describe the same mode; a zero u[i] still yields its generators.
GreenAction green_action(const std::vector<ModeMeromorphic>& g, int n, double gamma1, double gamma2,
                         const std::vector<RadialFunction>& u, const MellinOptions& opts = {});

struct ContourOptions {
    int nodes_per_side = 2048;
    MellinOptions mellin;
};

// (2 pi i)^{-1} times the rectangle integral of t^{-z} g(z) (Mu)(z) around the
// strip between the two weight lines, multiplied by omega(t). One row per mode.
std::vector<std::vector<Complex>> green_action_contour_oracle(const std::vector<ModeMeromorphic>& g, int n, double gamma1,
                                                              double gamma2, const std::vector<RadialFunction>& u,
                                                              const std::vector<double>& t_samples,
                                                              const ContourOptions& opts = {});

std::pair<GreenAction, GreenAction> green_split(const std::vector<ModeMeromorphic>& g, int n, double gamma1, double gamma,
                                                double gamma2, const std::vector<RadialFunction>& u,
                                                const MellinOptions& opts = {});

template <class F>
RadialFunction RadialFunction::sampled(F f, double a, double b, int n) {
    std::vector<double> ts(static_cast<std::size_t>(n));
    std::vector<Complex> vs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1);
        ts[static_cast<std::size_t>(i)] = std::exp(s);
        vs[static_cast<std::size_t>(i)] = f(ts[static_cast<std::size_t>(i)]);
    }
    ts.front() = a;
    ts.back() = b;
    return samples(std::move(ts), std::move(vs));
}

}  // namespace conelab
