#pragma once

#include <stdexcept>
#include <string>

namespace nmago {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (r < 0, u0 <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A standing assumption on f or K is violated (e.g. m = f(u0 - h*) <= 0).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// (N-1)-convexity is lost: a negative base under the (N-1)-th root.
class ConvexityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An integral that the construction needs diverges.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmago
