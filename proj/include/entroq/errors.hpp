#pragma once

#include <stdexcept>
#include <string>

namespace entroq {

/// Base class for every failure raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix required to be Hermitian deviates from its adjoint beyond tolerance.
struct NotHermitian : Error {
    using Error::Error;
};

/// Requested rank outside [1, dim].
struct BadRank : Error {
    using Error::Error;
};

/// Operand dimensions are inconsistent (channel vs. state, state vs. qubit count).
struct DimMismatch : Error {
    using Error::Error;
};

/// Depolarizing strength outside its admissible interval.
struct BadLambda : Error {
    using Error::Error;
};

/// Block index outside [0, n).
struct BadBlockIndex : Error {
    using Error::Error;
};

/// Member index outside a family's range.
struct BadIndex : Error {
    using Error::Error;
};

/// Exact computation refused: global matrix dimension above the desk-scale cap.
struct SizeLimit : Error {
    using Error::Error;
};

/// A constructed value no longer satisfies its type invariants.
struct InvariantViolation : Error {
    using Error::Error;
};

/// No block size can satisfy the requested bound.
struct Unreachable : Error {
    using Error::Error;
};

/// Gate layer fails validation (overlapping targets, bad indices, non-unitary, over budget).
struct BadLayer : Error {
    using Error::Error;
};

/// Malformed input file or JSON document.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace entroq
