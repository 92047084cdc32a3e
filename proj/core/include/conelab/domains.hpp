#pragma once

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conelab {

// coeff * t^{-q} * log^k t
struct Monomial {
    Complex q;
    std::optional<Rational> q_exact;
    int log_power = 0;
    Complex coeff;
    std::optional<Rational> coeff_exact;
};

// omega * sum(terms) tensored with every vector of the mode eigenspace
struct AsymptoticGenerator {
    std::size_t mode = 0;
    int multiplicity = 1;
    std::vector<Monomial> terms;
};

struct AsymptoticEntry {
    Complex q;
    std::optional<Rational> exact;
    int log_powers = 0;
    std::vector<std::size_t> modes;
    bool coupled = false;
};

struct AsymptoticSpace {
    int n = 0;
    int mu = 0;
    double gamma = 0.0;
    double window_lower = 0.0;  // (n+1)/2 - gamma - mu
    double window_upper = 0.0;  // (n+1)/2 - gamma
    double epsilon = 0.0;
    std::string directness;  // "direct" or "unknown"
    std::vector<AsymptoticEntry> entries;
    std::vector<AsymptoticGenerator> generators;
    int dimension = 0;
};

enum class DomainKind { MinimalPlain, MinimalWithEpsLoss, Direct };

struct DomainDescription {
    DomainKind kind = DomainKind::MinimalPlain;
    int sobolev_s = 0;
    double weight = 0.0;
    double critical_line = 0.0;
    std::vector<NonBijectivityPoint> critical_line_poles;
    std::optional<AsymptoticSpace> asymptotics;
};

const char* to_string(DomainKind k);

// Re z = (n+1)/2 - gamma - shift
double weight_line(int n, double gamma, double shift = 0.0);

DomainDescription minimal_domain(const ConeOperator& A, const BoundarySpectrum& S, double gamma, double p);
AsymptoticSpace maximal_domain_asymptotics(const ConeOperator& A, const BoundarySpectrum& S, double gamma);
DomainDescription maximal_domain(const ConeOperator& A, const BoundarySpectrum& S, double gamma, double p);

// Poles of the inverted conormal symbol lying exactly on the critical line.
std::vector<NonBijectivityPoint> critical_line_poles(const ConeOperator& A, const BoundarySpectrum& S, double gamma);

// ---- Laplacian family ----

// q_j^+ or q_j^- of one mode; log_pair marks q_j^+ = q_j^- (double root).
struct Exponent {
    Complex q;
    std::optional<Rational> exact;
    std::size_t mode = 0;
    int multiplicity = 1;
    int sign = 1;
    bool log_pair = false;
};

bool same_exponent(const Exponent& a, const Exponent& b);

// All indicial roots q_j^+ (sign +1) and q_j^- (sign -1), mode by mode.
std::vector<Exponent> indicial_roots(int n, const BoundarySpectrum& S);

// I_gamma = indicial roots in ](n+1)/2 - gamma - 2, (n+1)/2 - gamma[, sorted by Re q.
// Throws InvalidInput when the truncated spectrum could still contribute.
std::vector<Exponent> admissible_exponents(int n, const BoundarySpectrum& S, double gamma);

enum class SelectionKind { Zero, Full, Omega, LogOnly, Subspace };

const char* to_string(SelectionKind k);

// Choice of a subspace of E_q. For Subspace, basis holds orthonormal columns in
// the mode eigenspace. Omega and LogOnly occur only for the log pair.
struct Selection {
    Exponent exponent;
    SelectionKind kind = SelectionKind::Zero;
    Eigen::MatrixXcd basis;
    int dimension() const;
    // Projector onto the selected subspace of the eigenspace (non-log exponents).
    Eigen::MatrixXcd projector() const;
};

Selection make_subspace_selection(const Exponent& e, const Eigen::MatrixXcd& vectors);

struct Extension {
    std::string operator_name = "laplacian";
    int n = 1;
    double gamma = 0.0;
    double p = 2.0;
    std::string label;
    std::vector<Selection> selections;
    std::shared_ptr<const BoundarySpectrum> spectrum;

    bool dilation_invariant() const;
    bool is_minimal() const;
    bool is_maximal() const;
    const Selection* find(const Exponent& e) const;
    int dimension() const;
};

bool same_selection(const Selection& a, const Selection& b, double tol = 1e-10);
bool same_extension(const Extension& a, const Extension& b, double tol = 1e-10);

enum class ExtensionFilter { All, DilationInvariant };

std::vector<Extension> enumerate_extensions(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma,
                                            double p, ExtensionFilter filter);

Extension minimal_extension(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma, double p);
Extension maximal_extension(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S, double gamma, double p);
Extension friedrichs_domain(std::shared_ptr<const BoundarySpectrum> S, int n, double gamma = 0.0);

Extension adjoint_extension(const Extension& ext);
bool is_selfadjoint(const Extension& ext);
std::vector<Extension> selfadjoint_extensions(const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S);

// u = omega * sum(terms) (x) component, component a vector in the mode eigenspace.
struct PairingElement {
    std::size_t mode = 0;
    Eigen::VectorXcd component;
    std::vector<Monomial> terms;
};

struct QuadratureOptions {
    double tolerance = 1e-13;
    unsigned max_depth = 20;
};

struct PairingResult {
    Complex value;        // direct quadrature of <Delta u, v> - <u, Delta v>
    Complex closed_form;  // boundary term -lim_{t->0} t^{n-1} W(u, v)
};

PairingResult pairing_bracket(const PairingElement& u, const PairingElement& v, int n, const BoundarySpectrum& S,
                              const QuadratureOptions& opts = {});

// Basis of the selected asymptotic functions of an extension.
std::vector<PairingElement> extension_elements(const Extension& ext);
// Basis of the full asymptotic space at the extension's weight.
std::vector<PairingElement> asymptotic_elements(int n, const BoundarySpectrum& S, double gamma);

}  // namespace conelab
