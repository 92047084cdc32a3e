#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <optional>
#include <string>

namespace conelab {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
Complex to_complex(const Rational& r);

// Exact value of a finite double as a dyadic rational.
Rational exact_rational(double x);

// Best rational approximation with denominator <= max_den, accepted only if
// it lies within tol of x.
std::optional<Rational> rationalize(double x, long max_den = 1 << 20, double tol = 1e-9);

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

bool is_integer(const Rational& r);

}  // namespace conelab
