#pragma once

#include <stdexcept>
#include <string>

namespace chaos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold (bad axis, order mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A request exceeds one of the documented enumeration or size caps.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message carries the position when known.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaos
