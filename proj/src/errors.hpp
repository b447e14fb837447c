#pragma once

#include <stdexcept>
#include <string>

namespace regret {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A model or argument violates a documented invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Malformed or schema-incompatible input text.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Filesystem-level failure (open, read, write).
class IoError : public Error {
  public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed the hard size guard.
class GuardError : public Error {
  public:
    using Error::Error;
};

/// A finite-horizon controller was stepped past its last stage.
class HorizonError : public Error {
  public:
    using Error::Error;
};

} // namespace regret
