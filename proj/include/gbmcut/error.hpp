#pragma once

#include <stdexcept>
#include <string>

namespace gbmcut {

// Base for every error raised by the engine. Subclasses let callers (CLI exit
// codes, HTTP status mapping) tell failure classes apart without parsing text.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Point or index lies outside the volume.
class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// MetaImage header could not be parsed or violates the supported subset.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedElementType : public FormatError {
 public:
  using FormatError::FormatError;
};

class DataLengthMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};

// Internal consistency failure in the flow solver or graph construction.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbmcut
