#pragma once

#include <stdexcept>
#include <string>

namespace pinn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pivot of the symmetric factorization was not positive.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a space-time domain was called on a stationary one.
class WrongDomainKind : public Error {
 public:
  using Error::Error;
};

class InvalidRegularization : public Error {
 public:
  using Error::Error;
};

/// The assembled residual contains NaN or Inf, usually a diverged iterate.
class NonFiniteResidual : public Error {
 public:
  using Error::Error;
};

/// A relative error was requested against a vanishing reference norm.
class ZeroTruthNorm : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pinn
