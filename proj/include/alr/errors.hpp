#pragma once

#include <stdexcept>
#include <string>

namespace alr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// non-finite or structurally inconsistent input data
class InvalidDataError : public Error {
 public:
  using Error::Error;
};

// covariate index outside {1,...,d}
class IndexError : public Error {
 public:
  using Error::Error;
};

// matrix numerically singular where an invertible one is required
class RankError : public Error {
 public:
  using Error::Error;
};

// symmetric matrix is not positive definite
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// enumeration would exceed the configured collection cap
class SizeError : public Error {
 public:
  using Error::Error;
};

// a standard error required to be positive is zero
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

// sampled value exceeded the promised a-priori bound
class BoundViolationError : public Error {
 public:
  using Error::Error;
};

// malformed model list or model id
class ValidationError : public Error {
 public:
  using Error::Error;
};

// parameter outside its admissible range
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace alr
