#pragma once

#include "conelab/boundary.hpp"
#include "conelab/conormal.hpp"
#include "conelab/domains.hpp"
#include "conelab/ellipticity.hpp"
#include "conelab/mellin_green.hpp"
#include "conelab/resolvent.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace conelab {

using Json = nlohmann::ordered_json;

Json to_json(Complex z);
Complex complex_from_json(const Json& j);
Rational rational_from_json(const Json& j);

// {"mu": 2, "n": 1, "coeffs": [[j, [[t_power, [lambda coefficients...]], ...]], ...], "name": "..."}
ConeOperator operator_from_json(const Json& j);
Json to_json(const ConeOperator& A);

// {"dim_boundary": n, "modes": [[value, multiplicity], ...]}; "eigenvalues" is accepted as an alias and
// entries may also be plain values or the {eigenvalue, multiplicity} objects written by to_json.
BoundarySpectrum spectrum_from_json(const Json& j);
Json to_json(const BoundarySpectrum& S);

Json to_json(const ModeMeromorphic& g);
Json to_json(const NonBijectivityPoint& p);
Json to_json(const AsymptoticSpace& space);
Json to_json(const DomainDescription& d);

Json to_json(const Selection& s);
Json to_json(const Extension& ext);
// Accepts the document written by to_json(Extension).
Extension extension_from_json(const Json& j);
// "minimal" | "maximal" | "friedrichs" | "q=<value>:<kind>;..." with kind one of
// zero, full, omega, log-only, e<i>; exponents not named get the zero space.
Extension extension_from_spec(const std::string& spec, const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S,
                              double gamma, double p);
std::string selection_spec(const Extension& ext);

Json to_json(const E1Result& r);
Json to_json(const RuleResult& r);
Json to_json(const NumericResult& r);
Json to_json(const EllipticityReport& r);

// {"modes": [{"mode": 0, "base": "bump", "a": .., "b": .., "power": [re, im], "log_power": k, "scale": [re, im]}, ...]}
// or "base": "samples" with "t": [...] and "values": [[re, im], ...].
RadialFunction radial_function_from_json(const Json& j);
Json to_json(const RadialFunction& u);
Json to_json(const GreenAction& a);

// {"modes": [{"num": [..], "den": [..]}, ...]} with ascending rational coefficients
std::vector<ModeMeromorphic> symbol_from_json(const Json& j);

Json to_json(const DomainDiagnostic& d);
Json to_json(const ResolventResult& r, bool include_values);
Json to_json(const DecayFit& f);
Json to_json(const SpectralPoint& p);
Json to_json(const HeatReport& r);

}  // namespace conelab
