#pragma once

#include "conelab/conormal.hpp"
#include "conelab/domains.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conelab {

// Lambda_theta = {|arg z| >= theta} u {0}, 0 <= theta < pi. Under eta -> eta^mu
// the root sector Sigma = {|arg eta| >= theta / mu} u {0} maps onto it.
class Sector {
public:
    explicit Sector(double theta);
    double theta() const { return theta_; }
    double root_theta(int mu) const { return theta_ / mu; }
    bool contains(Complex z) const;
    // Default resolvent samples lying in the sector.
    std::vector<Complex> default_samples() const;

private:
    double theta_;
};

enum class Verdict { Pass, Fail, NotCovered, Disagreement, Inconclusive };

const char* to_string(Verdict v);

struct E1Witness {
    double xi_norm_sq = 0.0;
    double tau = 0.0;
    double t = 0.0;
    Complex value;
};

struct E1Result {
    bool pass = true;
    std::optional<E1Witness> witness;
    int angles = 0;
    int radii = 0;
    // extreme real parts of the symbol of A (not -A) over the grid
    double min_real = 0.0;
    double max_real = 0.0;
    double max_abs_imag = 0.0;
};

struct E2Result {
    bool pass = true;
    std::vector<std::string> offending;  // exponents whose selection is not dilation invariant
};

struct RuleResult {
    Verdict verdict = Verdict::Pass;
    std::string rule;     // which rule system applied
    std::string reason;
};

enum class Admissibility { DMin, Selected, Excluded };

const char* to_string(Admissibility a);

struct NumericModeDetail {
    std::size_t mode = 0;
    Complex lambda;
    double nu = 0.0;
    Complex q_plus;
    Complex q_minus;
    Admissibility plus = Admissibility::Excluded;
    Admissibility minus = Admissibility::Excluded;
    double slope = 0.0;              // fitted d log|u| / d log t near 0 (nu > 0)
    bool dominant_present = false;   // t^{-q+} (or log t when nu = 0) component
    bool subdominant_present = false;  // t^{-q-} (or constant when nu = 0) component
    double subdominant_ratio = 0.0;
    int index = 0;                   // admissible behaviours minus multiplicity
    int kernel_dimension = 0;
    bool inconclusive = false;
    bool spectral = false;
};

struct NumericOptions {
    double t_min = 1e-6;
    double t_max_scale = 50.0;  // t_max = t_max_scale / sqrt|lambda|
    double slope_margin = 0.05;
    double tolerance = 1e-11;
    int fit_points = 200;
};

struct NumericResult {
    Verdict verdict = Verdict::Pass;
    std::vector<NumericModeDetail> details;
    int inconclusive = 0;
    std::optional<std::size_t> witness;  // index into details
    std::string reason;
};

struct EllipticityReport {
    E1Result e1;
    E2Result e2;
    std::optional<RuleResult> e3_rule;
    std::optional<NumericResult> e3_numeric;
    Verdict e3 = Verdict::Pass;
    bool overall = false;
};

// (E1) on the symbols of -A over a (|xi|, tau) unit-circle x radius grid.
E1Result check_E1(const ConeOperator& A, const Sector& sector, int angles = 256, int radii = 256);
// (E2): dilation invariance of the selected asymptotics.
E2Result check_E2(const Extension& ext);
// (E3) by the rule systems for -Delta.
RuleResult check_E3_rule(const Extension& ext, const Sector& sector);
// (E3) by integrating the decaying mode solution of (lambda + Delta) u = 0.
NumericResult check_E3_numeric(const Extension& ext, const Sector& sector, const std::vector<Complex>& samples,
                               const NumericOptions& opts = {});

enum class E3Method { Rule, Numeric, Both };

EllipticityReport check_ellipticity(const ConeOperator& A, const Extension& ext, const Sector& sector, E3Method method,
                                    const std::vector<Complex>& samples = {}, const NumericOptions& opts = {});

}  // namespace conelab
