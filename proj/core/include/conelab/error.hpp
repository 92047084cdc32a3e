#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

enum class ErrorCode {
    NonMonotone,
    PositiveEigenvalue,
    DimensionMismatch,
    UnsupportedCoefficient,
    IdenticallyZero,
    UnsupportedOperator,
    NotDilationInvariant,
    WrongWeight,
    QuadratureFailure,
    WeightOutOfRange,
    PreconditionViolated,
    PoleOnLine,
    IllConditioned,
    SlopeUndefined,
    InvalidInput,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string module, const std::string& what)
        : std::runtime_error(what), code_(code), module_(std::move(module)) {}

    ErrorCode code() const { return code_; }
    const std::string& module() const { return module_; }
    const char* name() const { return error_name(code_); }

private:
    ErrorCode code_;
    std::string module_;
};

}  // namespace conelab
