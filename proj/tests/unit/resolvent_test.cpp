#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "conelab/boundary.hpp"
#include "conelab/domains.hpp"
#include "conelab/error.hpp"
#include "conelab/resolvent.hpp"
#include "oracles.hpp"

namespace conelab {
namespace {

DiscreteDomain disk(int modes = 3, int nodes = 400, double scale = 1.0) {
    auto S = std::make_shared<const BoundarySpectrum>(circle_spectrum(modes));
    return DiscreteDomain::build(friedrichs_domain(S, 1), nodes, 1e-6, scale);
}

Eigen::VectorXcd bump_nodes(const DiscreteDomain& dd, double a, double b) {
    RadialFunction f = RadialFunction::bump(a, b);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dd.s.size()));
    for (std::size_t i = 0; i < dd.s.size(); ++i) v(static_cast<Eigen::Index>(i)) = f(std::exp(dd.s[i]));
    v(v.size() - 1) = 0.0;
    return v;
}

Complex inner(const DiscreteDomain& dd, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    const auto w = dd.norm_weights();
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += w[static_cast<std::size_t>(i)] * u(i) * std::conj(v(i));
    return acc;
}

TEST(Resolvent, SolveResidualAndZeroRhs) {
    DiscreteDomain dd = disk();
    double residual = 1.0;
    Eigen::VectorXcd f = bump_nodes(dd, 0.2, 0.6);
    Eigen::VectorXcd u = mode_resolvent_solve(dd, Complex(-1.0), 1, f, 0, &residual);
    EXPECT_LE(residual, 1e-8);
    // mode_apply divides by the quadrature mass, which spans 12 decades over the grid
    EXPECT_LT((mode_apply(dd, Complex(-1.0), 1, u) - f).norm(), 1e-7 * f.norm());
    Eigen::VectorXcd z = mode_resolvent_solve(dd, Complex(-1.0), 1, Eigen::VectorXcd::Zero(f.size()));
    EXPECT_EQ(z.norm(), 0.0);
}

TEST(Resolvent, NearEigenvalueIsIllConditioned) {
    DiscreteDomain dd = disk();
    auto pts = detect_spectrum(dd, 1.0, 10.0, 1e-12);
    ASSERT_FALSE(pts.empty());
    try {
        mode_resolvent_solve(dd, Complex(pts[0].value), 0, bump_nodes(dd, 0.2, 0.6));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IllConditioned);
    }
}

TEST(Resolvent, ResolventIdentity) {
    DiscreteDomain dd = disk();
    Eigen::VectorXcd f = bump_nodes(dd, 0.2, 0.6);
    for (Complex zeta : {Complex(-2.0), Complex(-1.0, 4.0)}) {
        const Complex lambda(-1.0);
        Eigen::VectorXcd lhs = mode_resolvent_solve(dd, lambda, 0, f) - mode_resolvent_solve(dd, zeta, 0, f);
        Eigen::VectorXcd rhs = (zeta - lambda) * mode_resolvent_solve(dd, lambda, 0, mode_resolvent_solve(dd, zeta, 0, f));
        EXPECT_LT((lhs - rhs).norm(), 1e-7 * lhs.norm()) << zeta;
    }
}

TEST(Resolvent, SelfadjointSymmetry) {
    DiscreteDomain dd = disk();
    Eigen::VectorXcd f = bump_nodes(dd, 0.2, 0.6);
    Eigen::VectorXcd g = bump_nodes(dd, 0.1, 0.9) * Complex(0.3, 1.0);
    const Complex lambda(-1.0, 2.0);
    Complex a = inner(dd, mode_resolvent_solve(dd, lambda, 1, f), g);
    Complex b = inner(dd, f, mode_resolvent_solve(dd, std::conj(lambda), 1, g));
    EXPECT_LT(std::abs(a - b), 1e-8 * std::abs(a));
}

TEST(Resolvent, Linearity) {
    DiscreteDomain dd = disk();
    Eigen::VectorXcd f = bump_nodes(dd, 0.2, 0.6);
    Eigen::VectorXcd g = bump_nodes(dd, 0.05, 0.9);
    const Complex lambda(-1.0, 0.5);
    Eigen::VectorXcd lhs = mode_resolvent_solve(dd, lambda, 2, f + g);
    Eigen::VectorXcd rhs = mode_resolvent_solve(dd, lambda, 2, f) + mode_resolvent_solve(dd, lambda, 2, g);
    EXPECT_LT((lhs - rhs).norm(), 1e-10 * lhs.norm());
}

TEST(Resolvent, ApplyMatchesModeSolveAndDiagnostics) {
    DiscreteDomain dd = disk();
    ModeInput f{1, {}, RadialFunction::bump(0.2, 0.6)};
    ResolventResult r = resolvent_apply(dd, Complex(-1.0), {f});
    ASSERT_EQ(r.solutions.size(), 1u);
    EXPECT_LE(r.residual, 1e-8);
    for (const auto& d : r.diagnostics) EXPECT_TRUE(d.ok);
    Eigen::VectorXcd direct = mode_resolvent_solve(dd, Complex(-1.0), 1, bump_nodes(dd, 0.2, 0.6));
    EXPECT_LT((r.solutions[0].values - direct).norm(), 1e-10 * direct.norm());
    ResolventResult r2 = resolvent_apply(dd, Complex(-1.0), {ModeInput{1, {}, f.profile.scaled(2.0)}});
    EXPECT_LT((r2.solutions[0].values - 2.0 * r.solutions[0].values).norm(), 1e-10 * r2.solutions[0].values.norm());
}

TEST(Resolvent, GroundStateSanityBand) {
    DiscreteDomain dd = disk();
    const double j01 = oracle::bessel_zero(0, 1);
    const double mu = j01 * j01;
    RadialFunction ground = RadialFunction::sampled(
        [&](double t) { return Complex(oracle::bessel_j(0, j01 * t)); }, 1e-6, 1.0, 2000);
    ResolventResult r = resolvent_apply(dd, Complex(-1.0), {ModeInput{0, {}, ground}});
    const double ratio = r.norm_u / r.norm_f;
    EXPECT_NEAR(ratio, 1.0 / (1.0 + mu), 1e-3);
}

TEST(Resolvent, DecayFitAndScaling) {
    DiscreteDomain dd = disk(2, 200);
    EXPECT_THROW(norm_decay_fit(dd, M_PI, {10.0}), Error);
    DecayFit a = norm_decay_fit(dd, M_PI, {1.0, 10.0, 100.0});
    DiscreteDomain scaled = disk(2, 200, 3.0);
    DecayFit b = norm_decay_fit(scaled, M_PI, {3.0, 30.0, 300.0});
    EXPECT_NEAR(a.slope, b.slope, 1e-6);
    for (std::size_t i = 0; i < a.norms.size(); ++i) EXPECT_NEAR(b.norms[i], a.norms[i] / 3.0, 1e-6 * a.norms[i]);
    std::vector<double> want;
    const double j01 = oracle::bessel_zero(0, 1);
    for (double m : a.magnitudes) want.push_back(oracle::selfadjoint_resolvent_norm(j01 * j01, m));
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(a.norms[i], want[i], 1e-2 * want[i]);
}

TEST(Resolvent, BesselSpectrum) {
    DiscreteDomain dd = disk(3, 400);
    auto pts = detect_spectrum(dd, 1.0, 20.0, 1e-9);
    const double j01 = oracle::bessel_zero(0, 1), j11 = oracle::bessel_zero(1, 1);
    bool found0 = false, found1 = false;
    for (const auto& p : pts) {
        if (p.mode == 0 && std::abs(p.value - j01 * j01) < 1e-2) found0 = true;
        if (p.mode == 1 && std::abs(p.value - j11 * j11) < 5e-2) {
            found1 = true;
            EXPECT_EQ(p.multiplicity, 2);
        }
    }
    EXPECT_TRUE(found0);
    EXPECT_TRUE(found1);
    EXPECT_TRUE(detect_spectrum(dd, 2.0, 2.0).empty());
}

TEST(Resolvent, GridConvergence) {
    auto coarse = detect_spectrum(disk(3, 400), 1.0, 10.0, 1e-10);
    auto S = std::make_shared<const BoundarySpectrum>(circle_spectrum(3));
    auto fine = detect_spectrum(DiscreteDomain::build(friedrichs_domain(S, 1), 800, 5e-7), 1.0, 10.0, 1e-10);
    ASSERT_EQ(coarse.size(), 1u);
    ASSERT_EQ(fine.size(), 1u);
    EXPECT_LT(std::abs(coarse[0].value - fine[0].value), 1e-2);
}

TEST(Resolvent, HeatZeroForcingStaysZero) {
    DiscreteDomain dd = disk(2, 200);
    HeatForcing zero{"zero", [](double) { return 0.0; }, {ModeInput{0, {}, RadialFunction::bump(0.2, 0.6)}}};
    HeatReport r = heat_solve(dd, {zero}, 1.0, 20, 2.0, HeatScheme::ImplicitEuler);
    ASSERT_EQ(r.trajectories.size(), 1u);
    for (double v : r.trajectories[0].norms) EXPECT_EQ(v, 0.0);
}

TEST(Resolvent, HeatSteadyStateAndBound) {
    DiscreteDomain dd = disk(2, 200);
    ModeInput f{0, {}, RadialFunction::bump(0.2, 0.6)};
    HeatForcing constant{"constant", [](double) { return 1.0; }, {f}};
    HeatReport r = heat_solve(dd, {constant}, 6.0, 600, 2.0, HeatScheme::CrankNicolson);
    ResolventResult steady = resolvent_apply(dd, Complex(-1e-6), {f});
    const auto& u = r.trajectories[0].final_state.solutions[0].values;
    const auto& v = steady.solutions[0].values;
    EXPECT_LT((u + v).norm(), 1e-3 * v.norm());
    EXPECT_LE(r.max_ratio, 10.0 * r.oracle_bound);
}

}  // namespace
}  // namespace conelab
