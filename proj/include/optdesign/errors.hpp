#pragma once

#include <stdexcept>
#include <string>

namespace optdesign {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (bad parameter, non-PSD matrix, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the design space of the model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An unbounded axis reached an operation that needs a finite grid.
class MustTruncateError : public Error {
 public:
  using Error::Error;
};

/// Candidate set does not span the regression space.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

class EmptyDesignError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// No conditional model is registered for a (model, slice map) pair.
class NoConditionalModelError : public Error {
 public:
  using Error::Error;
};

/// Certificate and design disagree (e.g. a support atom is not active).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace optdesign
