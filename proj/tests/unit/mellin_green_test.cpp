#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"
#include "conelab/error.hpp"
#include "conelab/mellin_green.hpp"

namespace conelab {
namespace {

// R / (z - p)
ModeMeromorphic simple_pole(const Rational& p, const Rational& residue) {
    return ModeMeromorphic::from_exact(0, RationalFunctionQ(RationalPoly::constant(residue), RationalPoly::linear_root(p)));
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(Mellin, IndicatorClosedForm) {
    const double e = std::numbers::e;
    RadialFunction u = RadialFunction::indicator(1.0, e);
    EXPECT_LT(rel(mellin_transform(u, Complex(1.0)), Complex(e - 1.0)), 1e-8);
    const Complex z(0.3, 1.7);
    EXPECT_LT(rel(mellin_transform(u, z), (std::exp(z) - 1.0) / z), 1e-8);
}

TEST(Mellin, PowerTimesIndicator) {
    const double a = 0.7;
    RadialFunction u = RadialFunction::indicator(1.0, 2.0).times_power(a);
    const Complex z(-0.4, 2.3);
    const Complex want = (std::pow(Complex(2.0), z + a) - 1.0) / (z + a);
    EXPECT_LT(rel(mellin_transform(u, z), want), 1e-8);
}

TEST(Mellin, DerivativeOfIndicator) {
    RadialFunction u = RadialFunction::indicator(1.0, 2.0);
    const Complex z(0.5, 0.25);
    const Complex p = std::pow(Complex(2.0), z);
    const Complex want = (p * std::log(2.0) * z - (p - 1.0)) / (z * z);
    EXPECT_LT(rel(mellin_transform(u, z, 1), want), 1e-8);
}

TEST(Mellin, LargeImaginaryPartBoundedByTotalMass) {
    RadialFunction u = RadialFunction::bump(0.5, 2.0);
    const Complex z(1.0, 50.0);
    const double mass = std::abs(mellin_transform(u, Complex(1.0)));
    EXPECT_LE(std::abs(mellin_transform(u, z)), mass * (1 + 1e-12));
}

TEST(Mellin, SamplesReproduceIndicatorMass) {
    RadialFunction u = RadialFunction::sampled([](double) { return Complex(1.0); }, 1.0, 3.0, 64);
    EXPECT_LT(rel(mellin_transform(u, Complex(1.0)), Complex(2.0)), 1e-8);
    EXPECT_THROW(RadialFunction::samples({1.0, 0.5}, {Complex(1.0), Complex(1.0)}), Error);
}

TEST(Green, SimplePoleGivesResidueTimesMellin) {
    const std::vector<ModeMeromorphic> g{simple_pole(Rational(-1, 2), Rational(3))};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    GreenAction a = green_action(g, 1, 0.5, 2.5, u);
    ASSERT_EQ(a.rank(), 1u);
    EXPECT_EQ(a.terms[0].log_power, 0);
    EXPECT_NEAR(a.terms[0].pole.real(), -0.5, 1e-14);
    EXPECT_LT(rel(a.terms[0].zeta, 3.0 * mellin_transform(u[0], Complex(-0.5))), 1e-10);
}

TEST(Green, PolynomialSymbolHasNoGenerators) {
    const std::vector<ModeMeromorphic> g{
        ModeMeromorphic::from_exact(0, RationalFunctionQ::polynomial(RationalPoly({Rational(1), Rational(2)})))};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    EXPECT_EQ(green_action(g, 1, 0.5, 2.5, u).rank(), 0u);
    const std::vector<double> ts{0.05, 0.1};
    for (const auto& row : green_action_contour_oracle(g, 1, 0.5, 2.5, u, ts))
        for (Complex v : row) EXPECT_LE(std::abs(v), 1e-10);
}

TEST(Green, DoublePoleAgreesWithContourOracle) {
    auto inv = invert_conormal(conormal_symbol(ConeOperator::laplacian(1), circle_spectrum(2)));
    const std::vector<ModeMeromorphic> g{inv[0]};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    GreenAction a = green_action(g, 1, 0.5, 1.5, u);
    EXPECT_EQ(a.rank(), 2u);
    std::vector<double> ts;
    for (int i = 0; i < 10; ++i) ts.push_back(0.01 + 0.19 * i / 9.0);
    auto oracle = green_action_contour_oracle(g, 1, 0.5, 1.5, u, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_LT(rel(a.value(0, ts[i]), oracle[0][i]), 1e-8) << ts[i];
}

TEST(Green, LinearInTheInput) {
    const std::vector<ModeMeromorphic> g{simple_pole(Rational(0), Rational(1))};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    const std::vector<RadialFunction> u2{u[0].scaled(2.0)};
    GreenAction a = green_action(g, 1, 0.5, 1.5, u);
    GreenAction b = green_action(g, 1, 0.5, 1.5, u2);
    EXPECT_LT(rel(b.value(0, 0.1), 2.0 * a.value(0, 0.1)), 1e-12);
}

TEST(Green, PoleOnWeightLineIsRejected) {
    const std::vector<ModeMeromorphic> g{simple_pole(Rational(1, 2), Rational(1))};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    try {
        green_action(g, 1, 0.5, 2.5, u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PoleOnLine);
    }
}

TEST(Green, SplitSeparatesPoles) {
    const std::vector<ModeMeromorphic> g{ModeMeromorphic::from_exact(
        0, RationalFunctionQ(RationalPoly::constant(Rational(1)),
                             RationalPoly::linear_root(Rational(0)) * RationalPoly::linear_root(Rational(-1))))};
    const std::vector<RadialFunction> u{RadialFunction::bump(0.3, 0.8)};
    // lines at Re z = 0.5, -0.5, -1.5
    auto [g1, g2] = green_split(g, 1, 0.5, 1.5, 2.5, u);
    ASSERT_EQ(g1.rank(), 1u);
    ASSERT_EQ(g2.rank(), 1u);
    EXPECT_NEAR(g1.terms[0].pole.real(), 0.0, 1e-14);
    EXPECT_NEAR(g2.terms[0].pole.real(), -1.0, 1e-14);
    auto [h1, h2] = green_split(g, 1, 0.5, 2.2, 2.5, u);
    EXPECT_EQ(h1.rank(), 2u);
    EXPECT_EQ(h2.rank(), 0u);
    auto whole = green_action(g, 1, 0.5, 2.5, u);
    EXPECT_LT(rel(whole.value(0, 0.1), g1.value(0, 0.1) + g2.value(0, 0.1)), 1e-12);
}

}  // namespace
}  // namespace conelab
