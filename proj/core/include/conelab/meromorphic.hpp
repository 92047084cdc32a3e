#pragma once

#include "conelab/numeric.hpp"
#include "conelab/polynomial.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace conelab {

// A pole p of order n_p with principal part sum_k laurent[k] / (z - p)^{k+1}.
struct Pole {
    Complex value;
    std::optional<Rational> exact;
    int order = 0;
    std::vector<Complex> laurent;
    std::vector<Rational> laurent_exact;  // empty unless exact
};

struct Zero {
    Complex value;
    std::optional<Rational> exact;
    int order = 0;
};

class ModeMeromorphic {
public:
    static constexpr double kClusterTolerance = 1e-9;

    static ModeMeromorphic from_exact(std::size_t mode, RationalFunctionQ f);
    static ModeMeromorphic from_numeric(std::size_t mode, RationalFunctionC f,
                                        double cluster_tol = kClusterTolerance);

    std::size_t mode() const { return mode_; }
    bool is_exact() const { return exact_.has_value(); }
    const std::optional<RationalFunctionQ>& exact() const { return exact_; }
    const RationalFunctionC& numeric() const { return numeric_; }
    const std::vector<Pole>& poles() const { return poles_; }
    const std::vector<Zero>& zeros() const { return zeros_; }
    Complex scalar() const { return scalar_; }
    const ComplexPoly& polynomial_part() const { return polynomial_part_; }
    bool is_zero() const { return numeric_.is_zero(); }

    Complex operator()(Complex z) const { return numeric_(z); }
    Complex principal_part(Complex z) const;

    // z -> f(z + sigma); poles move to p - sigma with unchanged Laurent data.
    ModeMeromorphic shifted(const Rational& sigma) const;
    ModeMeromorphic shifted(Complex sigma) const;

private:
    void finish_numeric();
    std::size_t mode_ = 0;
    std::optional<RationalFunctionQ> exact_;
    RationalFunctionC numeric_;
    std::vector<Pole> poles_;
    std::vector<Zero> zeros_;
    Complex scalar_{0.0};
    ComplexPoly polynomial_part_;
};

struct RootCluster {
    Complex value;
    std::optional<Rational> exact;
    int multiplicity = 0;
};

// Roots of an exact polynomial with exact multiplicities; rational roots are
// recognised and verified exactly.
std::vector<RootCluster> exact_roots(const RationalPoly& p);

// Roots of a floating-point polynomial merged into clusters (roots closer than
// cluster_tol, or numerically split multiple roots) with multiplicities.
std::vector<RootCluster> clustered_roots(const ComplexPoly& p, double cluster_tol);

}  // namespace conelab
