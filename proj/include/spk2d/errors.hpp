#pragma once

#include <stdexcept>
#include <string>

namespace spk2d {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point, parameter or path outside the admissible domain (exit code 3).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON / CSV / command-line input (exit code 2).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Path fails validation: discontinuous, leaves B1*, crosses the origin.
class PathError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Least-squares fit impossible: too few samples or ill-conditioned design.
class FitError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Unreadable input file or unwritable output (exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spk2d
