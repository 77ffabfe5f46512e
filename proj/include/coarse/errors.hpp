#pragma once

#include <stdexcept>
#include <string>

namespace coarse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed normal form, or an element handed to the wrong group.
class InvalidElement : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the operation's domain (r <= 1, empty set, unknown name...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The ambient ball is too small to certify a distance or neighborhood.
class MarginError : public Error {
 public:
  using Error::Error;
};

/// Element cap or length-oracle coverage exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Dyadic numerator left the 63-bit range.
class OverflowError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

/// Iterative solver did not converge, or a conservation check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace coarse
