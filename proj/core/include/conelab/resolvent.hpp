#pragma once

#include "conelab/domains.hpp"
#include "conelab/mellin_green.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace conelab {

// Admissible solution near t = 0 on one part of a mode eigenspace.
enum class Behaviour { Plus, Minus, Constant, Log };

const char* to_string(Behaviour b);

struct BoundaryPart {
    Behaviour behaviour = Behaviour::Minus;
    Eigen::MatrixXcd projector;
    int dimension = 0;
};

// Realisation of A = -c Delta on the cone (0, 1] x boundary with Dirichlet
// data at t = 1, discretised on a uniform grid in s = log t.
struct DiscreteDomain {
    Extension extension;
    int nodes = 400;
    double t_min = 1e-6;
    double scale = 1.0;
    double h = 0.0;
    std::vector<double> s;
    std::vector<std::vector<BoundaryPart>> parts;  // per mode

    static DiscreteDomain build(const Extension& ext, int nodes = 400, double t_min = 1e-6, double scale = 1.0);
    std::size_t modes() const { return parts.size(); }
    // Discrete H^{0,gamma}_2 weights, one per node.
    std::vector<double> norm_weights() const;
};

// One forcing term on a mode: component (x) profile.
struct ModeInput {
    std::size_t mode = 0;
    Eigen::VectorXcd component;  // empty means the first basis vector
    RadialFunction profile;
};

// Solves (lambda - A) u = rhs on one part of one mode; rhs and the result hold
// nodal values (the last node is the Dirichlet node).
Eigen::VectorXcd mode_resolvent_solve(const DiscreteDomain& dd, Complex lambda, std::size_t mode, const Eigen::VectorXcd& rhs,
                                      std::size_t part = 0, double* residual = nullptr);

// (lambda - A) u on one part of one mode for nodal values u.
Eigen::VectorXcd mode_apply(const DiscreteDomain& dd, Complex lambda, std::size_t mode, const Eigen::VectorXcd& u,
                            std::size_t part = 0);

struct DomainDiagnostic {
    std::size_t mode = 0;
    std::size_t part = 0;
    Behaviour behaviour = Behaviour::Minus;
    Complex q_plus;
    Complex q_minus;
    Complex coeff_allowed;
    Complex coeff_excluded;
    // excluded branch size relative to max |u| on the innermost decade, fitted
    // against the discrete solutions of the grid recurrence (decides ok)
    double excluded_relative = 0.0;
    // same against the continuum powers t^{-q}; carries the O(h^2) grid error
    double continuum_excluded_relative = 0.0;
    bool ok = true;
};

struct ModeSolution {
    std::size_t mode = 0;
    std::size_t part = 0;
    Eigen::VectorXcd component;
    Eigen::VectorXcd values;
};

struct ResolventResult {
    Complex lambda;
    std::vector<ModeSolution> solutions;
    double residual = 0.0;
    double norm_u = 0.0;
    double norm_f = 0.0;
    std::vector<DomainDiagnostic> diagnostics;
};

ResolventResult resolvent_apply(const DiscreteDomain& dd, Complex lambda, const std::vector<ModeInput>& f);

struct NormEstimate {
    double norm = 0.0;
    std::size_t mode = 0;
    double residual = 0.0;  // worst solve residual met during the iteration
};

// ||R(lambda)|| in the discrete H^{0,gamma}_2 norm by power iteration on R R^*.
NormEstimate resolvent_norm(const DiscreteDomain& dd, Complex lambda, int iterations = 20, std::uint64_t seed = 0x5EED);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double tail_slope = 0.0;  // between the two largest magnitudes
    std::vector<double> magnitudes;
    std::vector<double> norms;
    std::vector<double> residuals;
};

DecayFit norm_decay_fit(const DiscreteDomain& dd, double arg, const std::vector<double>& magnitudes);

struct SpectralPoint {
    double value = 0.0;
    std::size_t mode = 0;
    std::size_t part = 0;
    int multiplicity = 1;
    double rcond = 0.0;  // reciprocal condition estimate of lambda - A at the point
};

// Eigenvalues of A in [a, b] by inertia counting and bisection.
std::vector<SpectralPoint> detect_spectrum(const DiscreteDomain& dd, double a, double b, double tol = 1e-9);

enum class HeatScheme { ImplicitEuler, CrankNicolson };

struct HeatForcing {
    std::string name;
    std::function<double(double)> time;  // time profile
    std::vector<ModeInput> space;
};

struct HeatTrajectory {
    std::string forcing;
    std::vector<double> times;
    std::vector<double> norms;  // ||u(t_k)||
    double ratio = 0.0;         // ||u'||_{l_q} / ||f||_{l_q}
    ResolventResult final_state;
};

struct HeatReport {
    HeatScheme scheme = HeatScheme::ImplicitEuler;
    double T = 0.0;
    int steps = 0;
    double q = 2.0;
    std::vector<HeatTrajectory> trajectories;
    double max_ratio = 0.0;
    double first_eigenvalue = 0.0;
    double oracle_bound = 0.0;  // single-mode bound 1 + (1 - exp(-mu_1 T))
};

// u' + A u = f on (0, T], u(0) = 0.
// Zero, constant, oscillating, switched and ramp forcings on the first modes.
// Terms on modes at or beyond `modes` are dropped, and so are forcings left empty.
std::vector<HeatForcing> heat_forcing_battery(std::size_t modes);

HeatReport heat_solve(const DiscreteDomain& dd, const std::vector<HeatForcing>& battery, double T, int steps, double q,
                      HeatScheme scheme);

}  // namespace conelab
