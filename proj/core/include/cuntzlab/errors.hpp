#pragma once

#include <stdexcept>
#include <string>

namespace cuntzlab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
/// Where the contract names a witnessing object (a point, a stage), it is
/// embedded in the message.
struct PreconditionError : Error {
    using Error::Error;
};

/// Input data failed structural validation (bad JSON, mismatched shapes,
/// broken invariants of a domain type).
struct ValidationError : Error {
    using Error::Error;
};

/// A numerical procedure could not complete on the given sample
/// (e.g. no admissible spectral band exists); the message carries the
/// diagnostic and, where sensible, a suggested remedy.
struct NumericalFailure : Error {
    using Error::Error;
};

} // namespace cuntzlab
