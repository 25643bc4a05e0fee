#pragma once

#include <stdexcept>
#include <string>

namespace infoqm {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes: convergence and instability failures exit with 3, the rest
/// with 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input: bad sizes, unsupported options, inconsistent specs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Non-finite sample or an integral that cannot be evaluated.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Root bracket without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Moment vector outside the interior of the moment cone.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Root structure differs from what the caller requires (e.g. several
/// sign changes where exactly one is expected).
class StructureError : public Error {
public:
    using Error::Error;
};

/// Gradient flow lost positivity; a smaller step usually fixes it.
class InstabilityError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace infoqm
