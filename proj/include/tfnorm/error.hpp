#pragma once

#include <stdexcept>
#include <string>

namespace tfnorm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live on different grids (or on grids of incompatible shape).
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold
/// (odd point count, exponent identity violated, off-lattice shift, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A value violates a type invariant (non-positive weight, non-finite sample, ...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Malformed spec string, config line or CSV file.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace tfnorm
