#pragma once

#include <stdexcept>
#include <string>

namespace bwt {

// Base class for every error raised by the library. Each subclass maps to a
// distinct CLI exit code (see tools/cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed matrices: non-square, non-symmetric, negative beyond tolerance,
// dimension mismatch.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A parameter is outside its admissible set (t outside [0,1], an N12 block
// violating the Kantorovich constraints, a misaligned Green pair, ...).
class InvalidParam : public Error {
 public:
  using Error::Error;
};

// rank(A) < rank(B): no linear optimal transport map from A to B.
class Unreachable : public Error {
 public:
  using Error::Error;
};

// B/A != 0, so no symmetric positive semidefinite transport map exists.
class NoSpdMap : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

// Inputs violate a structural precondition of a closed form (orthogonality).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

// Two independent computation routes disagree beyond tolerance.
class NumericalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace bwt
