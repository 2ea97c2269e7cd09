#pragma once

#include <stdexcept>
#include <string>

namespace csums {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sample or query region lies outside the grid window.
class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

// Operands live on incompatible lattices (spacing, dimension, semantics).
class IncompatibleGeometryError : public Error {
 public:
  using Error::Error;
};

// The FFT path cannot represent the convolution counts exactly.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A separator instance fails the separation property it must satisfy.
class InvalidInstanceError : public Error {
 public:
  using Error::Error;
};

// Allocation would exceed a configured memory guard.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace csums
