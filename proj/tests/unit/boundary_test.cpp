#include <gtest/gtest.h>

#include <cmath>

#include "conelab/boundary.hpp"
#include "conelab/error.hpp"
#include "oracles.hpp"

namespace conelab {
namespace {

TEST(Boundary, CircleEigenvaluesAndMultiplicities) {
    BoundarySpectrum s = circle_spectrum(5);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_EQ(s.dim_boundary(), 1);
    EXPECT_EQ(s.mode(0).multiplicity, 1);
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_DOUBLE_EQ(s.mode(k).eigenvalue, oracle::sphere_eigenvalue(1, static_cast<int>(k)));
        if (k > 0) {
            EXPECT_EQ(s.mode(k).multiplicity, 2);
        }
    }
    EXPECT_TRUE(s.is_exact());
}

TEST(Boundary, SphereMatchesHarmonicCount) {
    for (int d = 2; d <= 4; ++d) {
        BoundarySpectrum s = sphere_spectrum(d, 6);
        EXPECT_EQ(s.dim_boundary(), d);
        for (std::size_t l = 0; l < s.size(); ++l) {
            EXPECT_DOUBLE_EQ(s.mode(l).eigenvalue, oracle::sphere_eigenvalue(d, static_cast<int>(l)));
            EXPECT_EQ(s.mode(l).multiplicity, oracle::harmonic_count(d, static_cast<int>(l)));
            EXPECT_EQ(harmonic_dimension(d, static_cast<int>(l)), oracle::harmonic_count(d, static_cast<int>(l)));
        }
    }
}

TEST(Boundary, PointSpectrumIsSingleZeroMode) {
    BoundarySpectrum s = point_spectrum();
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.dim_boundary(), 0);
    EXPECT_EQ(s.mode(0).eigenvalue, 0.0);
}

TEST(Boundary, CustomSpectrumValidation) {
    EXPECT_NO_THROW(custom_spectrum({{0.0, 1}, {-2.5, 3}}, 2));
    try {
        custom_spectrum({{0.0, 1}, {1.0, 1}}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PositiveEigenvalue);
    }
    try {
        custom_spectrum({{-1.0, 1}, {-0.5, 1}}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonMonotone);
    }
    EXPECT_THROW(custom_spectrum({{0.0, 0}}, 1), Error);
}

TEST(Boundary, IntegralCustomEigenvaluesStayExact) {
    BoundarySpectrum s = custom_spectrum({{0.0, 1}, {-4.0, 2}}, 1);
    EXPECT_TRUE(s.is_exact());
    BoundarySpectrum t = custom_spectrum({{0.0, 1}, {-std::sqrt(2.0), 1}}, 1);
    EXPECT_FALSE(t.is_exact());
}

TEST(Boundary, TruncationKeepsLeadingModes) {
    BoundarySpectrum s = circle_spectrum(8).truncated(3);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s.mode(2).eigenvalue, -4.0);
    EXPECT_EQ(s.total_multiplicity(), 5);
}

TEST(Boundary, PresetPicksCrossSection) {
    EXPECT_EQ(preset_spectrum(0, 4).size(), 1u);
    EXPECT_EQ(preset_spectrum(1, 4).source(), SpectrumSource::Circle);
    EXPECT_EQ(preset_spectrum(3, 4).source(), SpectrumSource::Sphere);
}

}  // namespace
}  // namespace conelab
