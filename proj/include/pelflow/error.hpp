#pragma once

#include <stdexcept>
#include <string>

namespace pelflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure; the message carries the path.
class IoError : public Error {
public:
  using Error::Error;
};

/// Invalid arguments: bad sizes, out-of-range parameters, mismatched inputs.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Non-finite or singular arithmetic that no fallback could absorb.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace pelflow
