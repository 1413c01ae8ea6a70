#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace vesselkit {

enum class ErrorKind {
    DimensionMismatch,
    InvalidArgument,
    SingularOperator,
    NotHermitian,
    NonFiniteState,
    NonFiniteSample,
    PoleAt,
    DegenerateDenominator,
    NotReal,
    InadmissibleDirection,
    GramNotPositive,
    DuplicateNode,
    SingularDenominator,
    NotFound,
    SigmaMismatch,
    GridExhausted,
    OffGrid,
    SingularValue,
    QuadratureDiverged,
    NotSimilar,
    NotInRange,
    ConstraintViolated,
    Infeasible,
    SingularTheta,
    ConfigInvalid,
    IOFailure,
};

const char* error_kind_name(ErrorKind kind);

// Carries a kind plus an optional scalar (a residual, an index, or a min eigenvalue)
// and an optional complex point (the offending lambda).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double value = 0.0,
          std::complex<double> point = {})
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
          kind_(kind), value_(value), point_(point) {}

    ErrorKind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }
    std::complex<double> point() const noexcept { return point_; }

private:
    ErrorKind kind_;
    double value_;
    std::complex<double> point_;
};

} // namespace vesselkit
