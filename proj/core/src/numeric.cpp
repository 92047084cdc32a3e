#include "conelab/numeric.hpp"
#include "conelab/error.hpp"

#include <cmath>
#include <sstream>

namespace conelab {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonMonotone: return "NonMonotone";
        case ErrorCode::PositiveEigenvalue: return "PositiveEigenvalue";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnsupportedCoefficient: return "UnsupportedCoefficient";
        case ErrorCode::IdenticallyZero: return "IdenticallyZero";
        case ErrorCode::UnsupportedOperator: return "UnsupportedOperator";
        case ErrorCode::NotDilationInvariant: return "NotDilationInvariant";
        case ErrorCode::WrongWeight: return "WrongWeight";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::PoleOnLine: return "PoleOnLine";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::SlopeUndefined: return "SlopeUndefined";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Complex to_complex(const Rational& r) { return {to_double(r), 0.0}; }

Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
    int exp = 0;
    double mant = std::frexp(x, &exp);
    // mant * 2^53 is an integer for any double
    auto m = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(m);
    boost::multiprecision::cpp_int p = 1;
    p <<= static_cast<unsigned>(std::abs(exp));
    if (exp >= 0) return r * Rational(p);
    return r / Rational(p);
}

std::optional<Rational> rationalize(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    // continued fraction convergents
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rem = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(rem);
        if (std::abs(a) > 1e15) break;
        auto ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0;
        long long k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) {
            return Rational(h1) / Rational(k1);
        }
        double frac = rem - a;
        if (frac == 0.0) break;
        rem = 1.0 / frac;
    }
    return std::nullopt;
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            if (text.find_first_of(".eE") != std::string::npos) return exact_rational(std::stod(text));
            return Rational(boost::multiprecision::cpp_int(text));
        }
        boost::multiprecision::cpp_int a(text.substr(0, slash));
        boost::multiprecision::cpp_int b(text.substr(slash + 1));
        if (b == 0) throw std::invalid_argument("zero denominator");
        return Rational(a) / Rational(b);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::InvalidInput, "numeric", "cannot parse rational '" + text + "': " + e.what());
    }
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

}  // namespace conelab
