#pragma once

#include <stdexcept>
#include <string>

namespace semiscat {

/// Base class for every error this library signals on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// V'(0) requested where the conormal kink makes it unbounded or undefined.
struct SingularDerivative : Error {
    using Error::Error;
};

/// Adaptive step control drove the step below the hard floor (1e-15).
struct StepUnderflow : Error {
    using Error::Error;
};

/// Scattering requested at an energy at or below the barrier top.
struct NonPropagating : Error {
    using Error::Error;
};

/// No incident plane-wave component: the solution cannot be normalized.
struct DegenerateIncident : Error {
    using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance in budget.
struct QuadratureFailure : Error {
    using Error::Error;
};

/// Matching exponent outside ((2+alpha)/(2(alpha+1)), 1).
struct EtaOutOfWindow : Error {
    using Error::Error;
};

/// Interface crossing requested with |xi| below the transversality floor.
struct TangentialIncidence : Error {
    using Error::Error;
};

/// Branching requested at a boundary point that is not hyperbolic.
struct NotHyperbolic : Error {
    using Error::Error;
};

/// Argument outside a special function's domain.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace semiscat
