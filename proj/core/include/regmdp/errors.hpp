#pragma once

#include <stdexcept>
#include <string>

namespace regmdp {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model data is the wrong shape (dimension mismatch, empty spaces, ...).
struct ShapeError : Error {
  using Error::Error;
};

// A scalar is outside its admissible range (gamma, scale, tolerances, ...).
struct RangeError : Error {
  using Error::Error;
};

// A transition or policy row is not a probability distribution.
struct StochasticityError : Error {
  using Error::Error;
};

// An argument leaves the mathematical domain of an operation
// (negative probability, non-finite q-vector, ...).
struct DomainError : Error {
  using Error::Error;
};

// Malformed input file; message carries the offending field and position.
struct ParseError : Error {
  using Error::Error;
};

// Invalid run configuration (bad scheme name, non-monotone schedule, ...).
struct ConfigError : Error {
  using Error::Error;
};

// A divergence or recovery needs positivity the input does not have.
struct SupportError : Error {
  using Error::Error;
};

// A dense linear solve produced garbage (singular or non-finite system).
struct SolveError : Error {
  using Error::Error;
};

// An iterative solver hit its iteration cap before reaching tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

// Operation asked of a regularizer kind it is not defined for.
struct UnsupportedRegularizer : Error {
  using Error::Error;
};

}  // namespace regmdp
