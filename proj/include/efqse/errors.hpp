#pragma once

#include <stdexcept>
#include <string>

namespace efqse {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (FCIDUMP, config, ansatz record).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Index outside the declared dimension.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or unsupported configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Numerical stage failed (size caps, empty subspaces, unreliable mitigation).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Spectra could not be aligned by (spin, irrep, ordinal).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace efqse
