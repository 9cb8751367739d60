#pragma once

#include <stdexcept>
#include <string>

namespace freeconv {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input lies where the requested transform is undefined (e.g. on a support).
struct DomainError : Error {
    using Error::Error;
};

/// Scalar argument outside its admissible range.
struct RangeError : Error {
    using Error::Error;
};

/// The component scan cannot separate nearby boundaries at the current grid
/// resolution; the caller must raise it.
struct ResolutionError : Error {
    using Error::Error;
};

/// An iterative solve exhausted its budget.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Inconsistent dimensions between related inputs.
struct SizeError : Error {
    using Error::Error;
};

/// Requested eigenvalue rank exceeds the matrix size.
struct RankError : Error {
    using Error::Error;
};

/// Malformed configuration or data file.
struct ParseError : Error {
    using Error::Error;
};

/// A structural invariant failed to hold after construction.
struct InvariantError : Error {
    using Error::Error;
};

} // namespace freeconv
