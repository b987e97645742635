#pragma once

#include <stdexcept>
#include <string>

namespace precmat {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data fed in from outside (files, matrices,
// masks).  The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Parameter combinations that are rejected up front (negative lambda,
// SCAD a <= 2, prox called outside its validity range, ...).  Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A computation that started out fine but failed numerically: solver
// divergence, NaN in an iterate, eigendecomposition breakdown, a
// degenerate regression node.  Exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace precmat
