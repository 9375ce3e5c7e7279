#pragma once

#include <stdexcept>
#include <string>

namespace marton {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value failed validation (bad pmf, non-Hermitian matrix, eps out of range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Rate/band parameters for which no code construction exists.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}

  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

// A configured size cap (spectrum atoms, Hilbert dimension, alphabet) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// An iterative numerical routine did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message names the file and field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace marton
