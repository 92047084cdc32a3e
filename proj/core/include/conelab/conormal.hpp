#pragma once

#include "conelab/boundary.hpp"
#include "conelab/meromorphic.hpp"
#include "conelab/polynomial.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace conelab {

// t^{t_power} * P(lambda), lambda standing for the boundary Laplacian.
struct CoefficientTerm {
    int t_power = 0;
    RationalPoly lambda_poly;
};

// A = t^{-mu} sum_j a_j(t) (-t d/dt)^j with a_j polynomial in t and in the
// boundary Laplacian.
class ConeOperator {
public:
    ConeOperator(int mu, int n, std::vector<std::vector<CoefficientTerm>> coeffs, std::string name,
                 std::string interior = "cone-metric");

    static ConeOperator laplacian(int n);
    static ConeOperator example_abcd();

    int mu() const { return mu_; }
    int n() const { return n_; }
    const std::string& name() const { return name_; }
    const std::string& interior() const { return interior_; }
    const std::vector<CoefficientTerm>& coefficient(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }

    // (1/l!) d_t^l a_j (0) as a polynomial in lambda
    RationalPoly taylor_coefficient(int j, int l) const;
    int t_degree(int j) const;
    bool constant_coefficients() const;

    // c when A = c * Laplacian(n) for a rational c > 0.
    std::optional<Rational> laplacian_scale() const;
    ConeOperator scaled(const Rational& c) const;

private:
    int mu_;
    int n_;
    std::vector<std::vector<CoefficientTerm>> coeffs_;
    std::string name_;
    std::string interior_;
};

struct ModePolynomial {
    std::size_t mode = 0;
    std::optional<RationalPoly> exact;
    ComplexPoly numeric;
};

struct ConormalSymbol {
    int n = 0;
    int mu = 0;
    std::vector<ModePolynomial> modes;
};

ConormalSymbol conormal_symbol(const ConeOperator& A, const BoundarySpectrum& S);

// (xi_norm_sq, tau) -> sum_j sigma(a_j)(0) (-i tau)^j with the boundary
// Laplacian's principal symbol replaced by -|xi|^2.
std::function<Complex(double, double)> rescaled_symbol(const ConeOperator& A);

// Principal symbol in the interior at radius t in the same rescaled variables.
std::function<Complex(double, double)> interior_symbol(const ConeOperator& A, double t);

std::vector<ModeMeromorphic> invert_conormal(const ConormalSymbol& sigma);

struct NonBijectivityPoint {
    Complex q;
    std::optional<Rational> exact;
    int order = 0;
    std::set<std::size_t> modes;
};

std::vector<NonBijectivityPoint> nonbijectivity_points(const ConormalSymbol& sigma, double a, double b);

enum class SequenceKind { F, G };

// terms[l][mode], l = 0..mu-1
struct SymbolSequence {
    SequenceKind kind = SequenceKind::F;
    std::vector<std::vector<ModeMeromorphic>> terms;
};

SymbolSequence taylor_sequence(const ConeOperator& A, const BoundarySpectrum& S);
SymbolSequence g_recursion(const SymbolSequence& F);

// sum_{l<=j} (T^{-l} f_{j-l}) g_l == delta_{0j} for all j < mu. Exact when all
// entries are exact, otherwise checked at sample points to tol.
bool verify_kronecker(const SymbolSequence& F, const SymbolSequence& G, double tol = 1e-10);

}  // namespace conelab
