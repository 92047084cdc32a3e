#include <gtest/gtest.h>

#include <cmath>

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"
#include "conelab/error.hpp"
#include "oracles.hpp"

namespace conelab {
namespace {

const Complex kProbe(0.37, 0.21);

TEST(Conormal, LaplacianSymbolPerMode) {
    for (int n = 0; n <= 3; ++n) {
        BoundarySpectrum s = preset_spectrum(n, 4);
        ConormalSymbol sigma = conormal_symbol(ConeOperator::laplacian(n), s);
        ASSERT_EQ(sigma.modes.size(), s.size());
        for (std::size_t j = 0; j < s.size(); ++j) {
            const double lam = s.mode(j).eigenvalue;
            Complex expected = kProbe * kProbe - double(n - 1) * kProbe + lam;
            EXPECT_NEAR(std::abs(sigma.modes[j].numeric(kProbe) - expected), 0.0, 1e-13);
            ASSERT_TRUE(sigma.modes[j].exact.has_value());
        }
    }
}

TEST(Conormal, AbcdSymbolIsQuarterZSquaredMinusKSquared) {
    BoundarySpectrum s = circle_spectrum(4);
    ConormalSymbol sigma = conormal_symbol(ConeOperator::example_abcd(), s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double kk = double(k) * double(k);
        Complex expected = 0.25 * kProbe * kProbe - kk;
        EXPECT_NEAR(std::abs(sigma.modes[k].numeric(kProbe) - expected), 0.0, 1e-13);
    }
}

TEST(Conormal, DimensionMismatchIsReported) {
    try {
        conormal_symbol(ConeOperator::laplacian(2), circle_spectrum(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(Conormal, RescaledSymbolValues) {
    EXPECT_NEAR(std::abs(rescaled_symbol(ConeOperator::example_abcd())(1.0, 2.0) - Complex(-2.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(rescaled_symbol(ConeOperator::laplacian(1))(1.0, 1.0) - Complex(-2.0)), 0.0, 1e-14);
}

TEST(Conormal, InverseMatchesPartialFractions) {
    for (int n = 0; n <= 3; ++n) {
        BoundarySpectrum s = preset_spectrum(n, 4);
        auto inv = invert_conormal(conormal_symbol(ConeOperator::laplacian(n), s));
        for (std::size_t j = 0; j < s.size(); ++j) {
            const double lam = s.mode(j).eigenvalue;
            auto [qp, qm] = oracle::laplace_roots(n, lam);
            if (std::abs(qp - qm) < 1e-12) continue;
            Complex want = oracle::laplace_inverse_partial_fractions(n, lam, kProbe);
            EXPECT_NEAR(std::abs(inv[j](kProbe) - want), 0.0, 1e-12 * std::abs(want));
        }
    }
}

TEST(Conormal, InverseForPointCrossSection) {
    auto inv = invert_conormal(conormal_symbol(ConeOperator::laplacian(0), point_spectrum()));
    ASSERT_EQ(inv.size(), 1u);
    Complex want = 1.0 / kProbe - 1.0 / (kProbe + 1.0);
    EXPECT_NEAR(std::abs(inv[0](kProbe) - want), 0.0, 1e-13);
    ASSERT_EQ(inv[0].poles().size(), 2u);
}

TEST(Conormal, SphereModeOnePoles) {
    auto inv = invert_conormal(conormal_symbol(ConeOperator::laplacian(2), sphere_spectrum(2, 3)));
    std::vector<double> poles;
    for (const auto& p : inv[1].poles()) {
        ASSERT_TRUE(p.exact.has_value());
        poles.push_back(to_double(*p.exact));
    }
    std::sort(poles.begin(), poles.end());
    ASSERT_EQ(poles.size(), 2u);
    EXPECT_EQ(poles[0], -1.0);
    EXPECT_EQ(poles[1], 2.0);
}

TEST(Conormal, NonBijectivityOnTheCircle) {
    ConormalSymbol sigma = conormal_symbol(ConeOperator::laplacian(1), circle_spectrum(5));
    auto pts = nonbijectivity_points(sigma, -1.5, 1.5);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_NEAR(pts[0].q.real(), -1.0, 1e-14);
    EXPECT_NEAR(pts[1].q.real(), 0.0, 1e-14);
    EXPECT_EQ(pts[1].order, 2);
    EXPECT_NEAR(pts[2].q.real(), 1.0, 1e-14);
    EXPECT_TRUE(nonbijectivity_points(sigma, 0.2, 0.8).empty());
}

TEST(Conormal, NonBijectivityStripIsOpen) {
    ConormalSymbol sigma = conormal_symbol(ConeOperator::example_abcd(), circle_spectrum(5));
    EXPECT_TRUE(nonbijectivity_points(sigma, -1.0, 0.0).empty());
    EXPECT_TRUE(nonbijectivity_points(sigma, -1.0001, 0.0).empty());
    EXPECT_TRUE(nonbijectivity_points(sigma, 0.0, 0.0).empty());
    auto pts = nonbijectivity_points(sigma, -2.0001, 0.0);
    ASSERT_FALSE(pts.empty());
    EXPECT_NEAR(pts.front().q.real(), -2.0, 1e-12);
}

TEST(Conormal, AbcdTaylorSequence) {
    BoundarySpectrum s = circle_spectrum(3);
    SymbolSequence f = taylor_sequence(ConeOperator::example_abcd(), s);
    ASSERT_EQ(f.terms.size(), 2u);
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_NEAR(std::abs(f.terms[0][k](kProbe) - (0.25 * kProbe * kProbe + s.mode(k).eigenvalue)), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(f.terms[1][k](kProbe) - 0.25 * kProbe), 0.0, 1e-13);
    }
}

TEST(Conormal, AbcdGRecursionModeZero) {
    SymbolSequence f = taylor_sequence(ConeOperator::example_abcd(), circle_spectrum(3));
    SymbolSequence g = g_recursion(f);
    Complex z = kProbe;
    EXPECT_NEAR(std::abs(g.terms[0][0](z) - 4.0 / (z * z)), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(g.terms[1][0](z) - (-4.0 / ((z - 1.0) * (z - 1.0) * z))), 0.0, 1e-11);
    EXPECT_TRUE(verify_kronecker(f, g));
}

TEST(Conormal, KroneckerFailsForWrongSequence) {
    SymbolSequence f = taylor_sequence(ConeOperator::example_abcd(), circle_spectrum(3));
    SymbolSequence g = g_recursion(f);
    g.terms[1] = g.terms[0];
    EXPECT_FALSE(verify_kronecker(f, g));
}

}  // namespace
}  // namespace conelab
