#ifndef MBFV_ERRORS_HPP
#define MBFV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mbfv {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two values bound to different field specs were combined.
struct FieldMismatchError : Error {
  using Error::Error;
};

// Inversion or division by the zero element.
struct DivisionByZeroError : Error {
  using Error::Error;
};

// A caller-supplied parameter violates an operation precondition
// (k >= |features|, |pairs| < k, duplicate abscissa, ...).
struct ParameterError : Error {
  using Error::Error;
};

// A feature element does not fit the active field or fused universe.
struct EncodingOverflowError : Error {
  using Error::Error;
};

// Envelope state does not admit the requested operation
// (seal on a sealed record, unlocking-set from an encrypted record).
struct EnvelopeError : Error {
  using Error::Error;
};

// Malformed serialized data (record files, envelopes, config files).
struct FormatError : Error {
  using Error::Error;
};

// Invalid configuration (threshold counts, interval counts, universes).
struct ConfigError : Error {
  using Error::Error;
};

// A statistic was requested from a sample that cannot support it.
struct InsufficientDataError : Error {
  using Error::Error;
};

}  // namespace mbfv

#endif
