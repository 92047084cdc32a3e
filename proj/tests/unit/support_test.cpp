#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "conelab/meromorphic.hpp"
#include "conelab/numeric.hpp"
#include "conelab/parallel.hpp"
#include "conelab/polynomial.hpp"

namespace conelab {
namespace {

TEST(Numeric, RationalHelpers) {
    EXPECT_EQ(parse_rational("-3/4"), Rational(-3, 4));
    EXPECT_EQ(parse_rational("2"), Rational(2));
    EXPECT_EQ(to_string(Rational(5, 10)), "1/2");
    EXPECT_EQ(exact_rational(0.375), Rational(3, 8));
    ASSERT_TRUE(rationalize(1.0 / 3.0).has_value());
    EXPECT_EQ(*rationalize(1.0 / 3.0), Rational(1, 3));
    EXPECT_FALSE(rationalize(std::sqrt(2.0), 100, 1e-12).has_value());
    EXPECT_TRUE(is_integer(Rational(4, 2)));
}

TEST(Polynomial, ArithmeticAndDivision) {
    RationalPoly p({Rational(-1), Rational(0), Rational(1)});
    RationalPoly q = RationalPoly::linear_root(Rational(1));
    auto [quot, rem] = p.divmod(q);
    EXPECT_EQ(quot, RationalPoly({Rational(1), Rational(1)}));
    EXPECT_TRUE(rem.is_zero());
    EXPECT_EQ(gcd(p, q * q), q);
    EXPECT_EQ(p.shifted(Rational(1)), RationalPoly({Rational(0), Rational(2), Rational(1)}));
}

TEST(Polynomial, SquareFreeFactors) {
    RationalPoly z = RationalPoly::linear_root(Rational(0));
    RationalPoly w = RationalPoly::linear_root(Rational(2));
    auto f = square_free_factors(z * z * w * Rational(3));
    ASSERT_EQ(f.size(), 2u);
    int total = 0;
    for (const auto& [g, m] : f) total += g.degree() * m;
    EXPECT_EQ(total, 3);
}

TEST(Meromorphic, ExactRootsAndPoles) {
    RationalPoly z = RationalPoly::linear_root(Rational(0));
    RationalPoly one = RationalPoly::linear_root(Rational(1));
    auto roots = exact_roots(z * z * one);
    ASSERT_EQ(roots.size(), 2u);
    for (const auto& r : roots) {
        ASSERT_TRUE(r.exact.has_value());
        EXPECT_EQ(r.multiplicity, *r.exact == 0 ? 2 : 1);
    }
    ModeMeromorphic g = ModeMeromorphic::from_exact(0, RationalFunctionQ(RationalPoly::constant(Rational(1)), z * z * one));
    ASSERT_EQ(g.poles().size(), 2u);
    const Complex probe(0.3, 0.4);
    EXPECT_NEAR(std::abs(g.principal_part(probe) - g(probe)), 0.0, 1e-12);
    ModeMeromorphic h = g.shifted(Rational(1));
    EXPECT_NEAR(std::abs(h(probe) - g(probe + 1.0)), 0.0, 1e-12);
}

TEST(Meromorphic, ClusteredNumericRoots) {
    ComplexPoly p = ComplexPoly::linear_root(Complex(0.5)) * ComplexPoly::linear_root(Complex(0.5)) *
                    ComplexPoly::linear_root(Complex(-2.0, 1.0));
    auto c = clustered_roots(p, 1e-9);
    ASSERT_EQ(c.size(), 2u);
    int total = 0;
    for (const auto& r : c) total += r.multiplicity;
    EXPECT_EQ(total, 3);
}

TEST(Parallel, EveryIndexOnceAndLowestErrorWins) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    try {
        parallel_for(
            64,
            [](std::size_t i) {
                if (i == 7 || i == 40) throw std::runtime_error(std::to_string(i));
            },
            4);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
}

}  // namespace
}  // namespace conelab
