#include <gtest/gtest.h>

#include <memory>

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"
#include "conelab/domains.hpp"
#include "conelab/error.hpp"

namespace conelab {
namespace {

std::shared_ptr<const BoundarySpectrum> spectrum(int n, int modes = 6) {
    return std::make_shared<const BoundarySpectrum>(preset_spectrum(n, modes));
}

const Selection& only_log_pair(const Extension& ext) {
    for (const auto& s : ext.selections)
        if (s.exponent.log_pair) return s;
    throw std::runtime_error("no log pair");
}

Extension with_log_kind(SelectionKind kind) {
    auto S = spectrum(1);
    Extension ext = minimal_extension(ConeOperator::laplacian(1), S, 0.0, 2.0);
    for (auto& s : ext.selections)
        if (s.exponent.log_pair) s.kind = kind;
    return ext;
}

Monomial mono(double q, int k, double c) {
    Monomial m;
    m.q = q;
    m.log_power = k;
    m.coeff = c;
    return m;
}

PairingElement element(std::size_t mode, int mult, std::vector<Monomial> terms) {
    PairingElement e;
    e.mode = mode;
    e.component = Eigen::VectorXcd::Zero(mult);
    e.component(0) = 1.0;
    e.terms = std::move(terms);
    return e;
}

TEST(Domains, MinimalDomainKinds) {
    auto lap1 = minimal_domain(ConeOperator::laplacian(1), circle_spectrum(6), 0.0, 2.0);
    EXPECT_EQ(lap1.kind, DomainKind::MinimalWithEpsLoss);
    EXPECT_FALSE(lap1.critical_line_poles.empty());
    auto abcd = minimal_domain(ConeOperator::example_abcd(), circle_spectrum(6), 0.0, 2.0);
    EXPECT_EQ(abcd.kind, DomainKind::MinimalPlain);
    EXPECT_EQ(abcd.sobolev_s, 2);
    EXPECT_DOUBLE_EQ(abcd.weight, 2.0);
    auto lap2 = minimal_domain(ConeOperator::laplacian(2), sphere_spectrum(2, 8), 0.0, 2.0);
    EXPECT_EQ(lap2.kind, DomainKind::MinimalPlain);
    EXPECT_THROW(minimal_domain(ConeOperator::laplacian(1), circle_spectrum(3), 0.0, 1.0), Error);
}

TEST(Domains, AbcdMaximalAsymptoticsIsTwoDimensional) {
    AsymptoticSpace e = maximal_domain_asymptotics(ConeOperator::example_abcd(), circle_spectrum(6), 0.0);
    EXPECT_EQ(e.dimension, 2);
    ASSERT_EQ(e.generators.size(), 2u);
    bool coupled = false;
    for (const auto& entry : e.entries) coupled = coupled || entry.coupled;
    EXPECT_TRUE(coupled);
    bool saw_log_plus_t = false;
    for (const auto& g : e.generators) {
        bool has_log = false, has_t = false;
        for (const auto& m : g.terms) {
            if (m.log_power == 1 && std::abs(m.q) < 1e-14) has_log = true;
            if (m.log_power == 0 && std::abs(m.q + 1.0) < 1e-14) has_t = true;
        }
        saw_log_plus_t = saw_log_plus_t || (has_log && has_t);
    }
    EXPECT_TRUE(saw_log_plus_t);
}

TEST(Domains, LaplacianCircleAsymptotics) {
    AsymptoticSpace e = maximal_domain_asymptotics(ConeOperator::laplacian(1), circle_spectrum(6), 0.0);
    EXPECT_EQ(e.dimension, 2);
    ASSERT_EQ(e.entries.size(), 1u);
    EXPECT_EQ(e.entries[0].log_powers, 1);
    EXPECT_NEAR(std::abs(e.entries[0].q), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(e.window_lower, -1.0);
    EXPECT_DOUBLE_EQ(e.window_upper, 1.0);
}

TEST(Domains, EmptyStripGivesEmptySpace) {
    AsymptoticSpace e = maximal_domain_asymptotics(ConeOperator::laplacian(1), circle_spectrum(6), 0.5);
    for (const auto& entry : e.entries) {
        EXPECT_GE(entry.q.real(), e.window_lower);
        EXPECT_LT(entry.q.real(), e.window_upper);
    }
    AsymptoticSpace none = maximal_domain_asymptotics(ConeOperator::laplacian(1), custom_spectrum({{-25.0, 1}}, 1), 0.0);
    EXPECT_EQ(none.dimension, 0);
}

TEST(Domains, DimensionCountMatchesPoleCount) {
    for (int n : {1, 2, 3}) {
        BoundarySpectrum s = preset_spectrum(n, 6);
        for (double gamma : {-0.5, 0.0, 0.5}) {
            AsymptoticSpace e = maximal_domain_asymptotics(ConeOperator::laplacian(n), s, gamma);
            auto inv = invert_conormal(conormal_symbol(ConeOperator::laplacian(n), s));
            int expected = 0;
            for (std::size_t m = 0; m < inv.size(); ++m)
                for (const auto& p : inv[m].poles())
                    if (p.value.real() > e.window_lower && p.value.real() < e.window_upper)
                        expected += p.order * s.mode(m).multiplicity;
            EXPECT_EQ(e.dimension, expected) << "n=" << n << " gamma=" << gamma;
        }
    }
}

TEST(Domains, EnumerationCounts) {
    auto S = spectrum(1);
    auto di = enumerate_extensions(ConeOperator::laplacian(1), S, 0.0, 2.0, ExtensionFilter::DilationInvariant);
    EXPECT_EQ(di.size(), 3u);
    auto all = enumerate_extensions(ConeOperator::laplacian(1), S, 0.0, 2.0, ExtensionFilter::All);
    EXPECT_GE(all.size(), di.size());
    EXPECT_THROW(enumerate_extensions(ConeOperator::example_abcd(), S, 0.0, 2.0, ExtensionFilter::All), Error);
}

TEST(Domains, EmptyAdmissibleSetGivesOneExtension) {
    auto S = std::make_shared<const BoundarySpectrum>(custom_spectrum({{-25.0, 1}}, 1));
    auto exts = enumerate_extensions(ConeOperator::laplacian(1), S, 0.0, 2.0, ExtensionFilter::DilationInvariant);
    EXPECT_TRUE(admissible_exponents(1, *S, 0.0).empty());
    EXPECT_EQ(exts.size(), 1u);
}

TEST(Domains, AdjointOfLogPairSelections) {
    EXPECT_EQ(only_log_pair(adjoint_extension(with_log_kind(SelectionKind::Omega))).kind, SelectionKind::Omega);
    EXPECT_EQ(only_log_pair(adjoint_extension(with_log_kind(SelectionKind::Zero))).kind, SelectionKind::Full);
    EXPECT_EQ(only_log_pair(adjoint_extension(with_log_kind(SelectionKind::Full))).kind, SelectionKind::Zero);
}

TEST(Domains, AdjointOfMinimalIsMaximal) {
    for (int n : {0, 1, 2, 3}) {
        auto S = spectrum(n);
        Extension mn = minimal_extension(ConeOperator::laplacian(n), S, 0.0, 2.0);
        Extension mx = maximal_extension(ConeOperator::laplacian(n), S, 0.0, 2.0);
        EXPECT_TRUE(same_extension(adjoint_extension(mn), mx)) << "n=" << n;
    }
}

TEST(Domains, Biduality) {
    for (int n : {0, 1, 2}) {
        auto S = spectrum(n, 5);
        for (double gamma : {-0.5, 0.0, 0.5}) {
            for (const auto& ext : enumerate_extensions(ConeOperator::laplacian(n), S, gamma, 2.0,
                                                        ExtensionFilter::DilationInvariant)) {
                Extension adj = adjoint_extension(ext);
                EXPECT_DOUBLE_EQ(adj.gamma, -gamma);
                EXPECT_TRUE(same_extension(adjoint_extension(adj), ext)) << "n=" << n << " " << ext.label;
            }
        }
    }
}

TEST(Domains, SelfadjointClassification) {
    EXPECT_TRUE(is_selfadjoint(with_log_kind(SelectionKind::Omega)));
    EXPECT_FALSE(is_selfadjoint(with_log_kind(SelectionKind::Zero)));
    auto S = spectrum(1);
    EXPECT_FALSE(is_selfadjoint(minimal_extension(ConeOperator::laplacian(1), S, 0.0, 2.0)));
    Extension shifted = with_log_kind(SelectionKind::Omega);
    shifted.gamma = 0.5;
    try {
        is_selfadjoint(shifted);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WrongWeight);
    }
    for (const auto& ext : selfadjoint_extensions(ConeOperator::laplacian(1), S)) EXPECT_TRUE(is_selfadjoint(ext));
}

TEST(Domains, FriedrichsSelections) {
    Extension f1 = friedrichs_domain(spectrum(1), 1);
    EXPECT_EQ(only_log_pair(f1).kind, SelectionKind::Omega);
    for (const auto& s : f1.selections) {
        if (s.exponent.log_pair) continue;
        EXPECT_EQ(s.kind, s.exponent.q.real() < 0 ? SelectionKind::Full : SelectionKind::Zero);
    }
    for (int n : {1, 2, 3}) {
        Extension f = friedrichs_domain(spectrum(n), n);
        EXPECT_TRUE(f.dilation_invariant());
        EXPECT_TRUE(is_selfadjoint(f)) << "n=" << n;
        if (n == 1) continue;
        for (const auto& s : f.selections) {
            EXPECT_EQ(s.kind, s.exponent.q.real() <= 0.5 * (n - 1) + 1e-12 ? SelectionKind::Full : SelectionKind::Zero);
        }
    }
    EXPECT_THROW(friedrichs_domain(spectrum(1), 1, 0.5), Error);
}

TEST(Domains, FriedrichsWithEmptyAdmissibleSet) {
    auto S = std::make_shared<const BoundarySpectrum>(custom_spectrum({{-25.0, 1}}, 1));
    EXPECT_TRUE(friedrichs_domain(S, 1).selections.empty());
}

TEST(Domains, LatticeContainment) {
    auto S = spectrum(2, 4);
    Extension mn = minimal_extension(ConeOperator::laplacian(2), S, 0.0, 2.0);
    Extension mx = maximal_extension(ConeOperator::laplacian(2), S, 0.0, 2.0);
    for (const auto& ext : enumerate_extensions(ConeOperator::laplacian(2), S, 0.0, 2.0, ExtensionFilter::All)) {
        EXPECT_GE(ext.dimension(), mn.dimension());
        EXPECT_LE(ext.dimension(), mx.dimension());
    }
}

TEST(Domains, PairingSameExponentVanishes) {
    auto S = circle_spectrum(4);
    auto u = element(1, 2, {mono(-1.0, 0, 1.0)});
    PairingResult r = pairing_bracket(u, u, 1, S);
    EXPECT_LT(std::abs(r.value), 1e-8);
    EXPECT_LT(std::abs(r.closed_form), 1e-12);
}

TEST(Domains, PairingAcrossModesVanishes) {
    auto S = circle_spectrum(4);
    auto u = element(1, 2, {mono(-1.0, 0, 1.0)});
    auto v = element(2, 2, {mono(-2.0, 0, 1.0)});
    EXPECT_LT(std::abs(pairing_bracket(u, v, 1, S).value), 1e-12);
}

TEST(Domains, PairingLogPairMatchesClosedForm) {
    auto S = circle_spectrum(4);
    auto u = element(0, 1, {mono(0.0, 1, 1.0)});
    auto v = element(0, 1, {mono(0.0, 0, 1.0)});
    PairingResult r = pairing_bracket(u, v, 1, S);
    EXPECT_NEAR(std::abs(r.closed_form), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r.value - r.closed_form), 0.0, 1e-8);
}

TEST(Domains, PairingPartnerExponents) {
    auto S = circle_spectrum(4);
    auto u = element(1, 2, {mono(-1.0, 0, 1.0)});
    auto v = element(1, 2, {mono(1.0, 0, 1.0)});
    PairingResult r = pairing_bracket(u, v, 1, S);
    EXPECT_NEAR(std::abs(r.closed_form), 2.0, 1e-12);
    EXPECT_NEAR(std::abs(r.value - r.closed_form), 0.0, 1e-8);
}

}  // namespace
}  // namespace conelab
