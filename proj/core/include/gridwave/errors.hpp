#pragma once

#include <stdexcept>
#include <string>

namespace gridwave {

/// Base class for all gridwave errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV/JSON syntax, bad numbers, wrong headers).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a domain invariant
/// (out-of-range coordinate, insufficient stations, bad scenario).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular or ill-conditioned system, unstable
/// integration, degenerate regression.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridwave
