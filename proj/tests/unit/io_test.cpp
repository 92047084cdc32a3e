#include <gtest/gtest.h>

#include <memory>

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"
#include "conelab/domains.hpp"
#include "conelab/error.hpp"
#include "conelab/io.hpp"

namespace conelab {
namespace {

TEST(Io, OperatorRoundTrip) {
    for (const ConeOperator& A : {ConeOperator::laplacian(2), ConeOperator::example_abcd()}) {
        ConeOperator B = operator_from_json(to_json(A));
        EXPECT_EQ(B.mu(), A.mu());
        EXPECT_EQ(B.n(), A.n());
        EXPECT_EQ(B.name(), A.name());
        for (int j = 0; j <= A.mu(); ++j)
            for (int l = 0; l <= 2; ++l) EXPECT_EQ(B.taylor_coefficient(j, l), A.taylor_coefficient(j, l));
    }
}

TEST(Io, OperatorFromDocument) {
    Json j = Json::parse(R"({"mu": 2, "n": 1, "coeffs": [[0, [[0, [0, 1]]]], [1, [[1, ["1/4"]]]], [2, [[0, ["1/4"]]]]]})");
    ConeOperator A = operator_from_json(j);
    EXPECT_EQ(A.taylor_coefficient(1, 1), RationalPoly::constant(Rational(1, 4)));
    EXPECT_FALSE(A.constant_coefficients());
}

TEST(Io, SpectrumFromDocument) {
    BoundarySpectrum s = spectrum_from_json(Json::parse(R"({"dim_boundary": 1, "eigenvalues": [[0, 1], [-1, 2], [-4, 2]]})"));
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.mode(1).multiplicity, 2);
    EXPECT_TRUE(s.is_exact());
    EXPECT_THROW(spectrum_from_json(Json::parse(R"({"dim_boundary": 1, "eigenvalues": [[0, 1], [2, 1]]})")), Error);
    BoundarySpectrum m = spectrum_from_json(Json::parse(R"({"dim_boundary": 2, "modes": [[0, 1], [-2, 3]]})"));
    EXPECT_EQ(m.total_multiplicity(), 4);
    BoundarySpectrum back = spectrum_from_json(to_json(sphere_spectrum(2, 3)));
    EXPECT_EQ(back.size(), 3u);
    EXPECT_EQ(back.mode(2).multiplicity, 5);
}

TEST(Io, ExtensionJsonRoundTrip) {
    auto S = std::make_shared<const BoundarySpectrum>(circle_spectrum(6));
    for (const auto& ext :
         enumerate_extensions(ConeOperator::laplacian(1), S, 0.0, 2.0, ExtensionFilter::DilationInvariant)) {
        Extension back = extension_from_json(Json::parse(to_json(ext).dump()));
        EXPECT_TRUE(same_extension(back, ext)) << ext.label;
    }
}

TEST(Io, ExtensionSpecStrings) {
    auto S = std::make_shared<const BoundarySpectrum>(circle_spectrum(6));
    const ConeOperator A = ConeOperator::laplacian(1);
    Extension fried = extension_from_spec("friedrichs", A, S, 0.0, 2.0);
    EXPECT_TRUE(same_extension(fried, friedrichs_domain(S, 1)));
    Extension omega = extension_from_spec("q=0:omega", A, S, 0.0, 2.0);
    EXPECT_TRUE(same_extension(omega, fried));
    Extension again = extension_from_spec(selection_spec(omega), A, S, 0.0, 2.0);
    EXPECT_TRUE(same_extension(again, omega));
    EXPECT_TRUE(extension_from_spec("minimal", A, S, 0.0, 2.0).is_minimal());
    EXPECT_TRUE(extension_from_spec("maximal", A, S, 0.0, 2.0).is_maximal());
    EXPECT_THROW(extension_from_spec("q=0:sideways", A, S, 0.0, 2.0), Error);
}

TEST(Io, RadialFunctionDocument) {
    RadialFunction u = radial_function_from_json(
        Json::parse(R"({"base": "indicator", "a": 1.0, "b": 2.0, "power": [1.0, 0.0], "scale": [2.0, 0.0]})"));
    EXPECT_NEAR(std::abs(u(1.5) - Complex(3.0)), 0.0, 1e-14);
    EXPECT_EQ(u(2.5), Complex(0.0));
}

TEST(Io, SymbolDocument) {
    auto g = symbol_from_json(Json::parse(R"({"modes": [{"num": [1], "den": [0, 1]}]})"));
    ASSERT_EQ(g.size(), 1u);
    ASSERT_EQ(g[0].poles().size(), 1u);
    EXPECT_NEAR(std::abs(g[0].poles()[0].value), 0.0, 1e-15);
}

TEST(Io, ComplexEncoding) {
    Json j = to_json(Complex(1.5, -2.0));
    EXPECT_EQ(j.dump(), "[1.5,-2.0]");
    EXPECT_EQ(complex_from_json(j), Complex(1.5, -2.0));
    EXPECT_EQ(rational_from_json(Json("3/4")), Rational(3, 4));
}

}  // namespace
}  // namespace conelab
