#pragma once

#include <stdexcept>
#include <string>

namespace meshfft {

// Base for every error raised by the library. Callers that only care about
// "the request was bad" can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizes that are not powers of two, mismatched buffers, indivisible meshes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Inputs containing NaN or Inf.
class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

// Per-PE memory would overflow for the requested (n, m, precision).
class Infeasible : public Error {
 public:
  using Error::Error;
};

// The discrete-event simulation would exceed its configured event budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent grid file / sidecar.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshfft
