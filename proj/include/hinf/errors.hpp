#pragma once

#include <stdexcept>
#include <string>

namespace hinf {

// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs whose shapes do not conform.
struct DimensionMismatch : Error {
    using Error::Error;
};

// A decomposition or iteration failed beyond recovery.
struct NumericalFailure : Error {
    using Error::Error;
};

// Linear solve against a matrix that is singular at working precision.
struct SingularMatrix : Error {
    using Error::Error;
};

// A matrix required to have full column rank does not.
struct RankDeficient : Error {
    using Error::Error;
};

// An operation that needs a Hurwitz matrix received an unstable one.
struct UnstablePlant : Error {
    using Error::Error;
};

// Invariant zeros sit on (or numerically at) the imaginary axis, which the
// reduction cannot handle.
struct ImaginaryAxisZero : Error {
    using Error::Error;
};

// Null vectors collected for a certificate are linearly dependent.
struct DependentNullVectors : Error {
    using Error::Error;
};

// A certificate fails its defining equations at the requested tolerance.
struct InvalidCertificate : Error {
    using Error::Error;
};

// Dependent constraints found while pruning a reduced problem disagree on
// their right-hand sides; the original problem is infeasible.
struct InconsistentPruning : Error {
    using Error::Error;
};

// A non-square zero pencil produced candidates the rank sweep cannot settle.
struct NonSquarePencilUnsupported : Error {
    using Error::Error;
};

// Malformed text or JSON input.
struct ParseError : Error {
    using Error::Error;
};

// A solver backend could not be reached or failed to produce a report.
struct BackendUnavailable : Error {
    using Error::Error;
};

}  // namespace hinf
