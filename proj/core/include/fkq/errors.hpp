#pragma once

#include <stdexcept>
#include <string>

namespace fkq {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inputs (bad spacing, empty region, unknown name).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

class NotImplementedError : public Error {
 public:
  using Error::Error;
};

/// Bump supports overlap: the construction no longer guarantees a
/// non-degenerate critical set.
class OverlapError : public Error {
 public:
  using Error::Error;
};

/// No non-degenerate critical point was found in the search region.
class DegeneratePotentialError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

/// A local inverse was asked for a value outside its ball of definition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class InfeasibleTypeError : public Error {
 public:
  using Error::Error;
};

/// The contraction left the domain of the local inverses mid-run.
class DomainBreachError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class VerificationFailure : public Error {
 public:
  VerificationFailure(std::string clause, const std::string& what)
      : Error(what), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

}  // namespace fkq
