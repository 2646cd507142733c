#pragma once

#include <stdexcept>
#include <string>

namespace dissext {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: violated type invariant, bad dimensions, bad schema.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what, std::string field = {})
      : Error(what), field_(std::move(field)) {}
  /// JSON pointer (or parameter name) of the offending field, if known.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NonHermitian : public Error {
 public:
  NonHermitian(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

/// The imaginary-part form is not bounded below by epsilon: the criterion
/// does not apply (the oracle route still does).
class StrictPositivityViolated : public Error {
 public:
  StrictPositivityViolated(double min_eigenvalue, double epsilon)
      : Error("strict positivity violated: min eigenvalue " +
              std::to_string(min_eigenvalue) + " < epsilon " +
              std::to_string(epsilon)),
        min_eigenvalue_(min_eigenvalue),
        epsilon_(epsilon) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  double min_eigenvalue_;
  double epsilon_;
};

/// A function fails a required Sobolev / boundary membership.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// v is outside the domain of W*; no extension containing v is dissipative.
class NotInWStarDomain : public DomainViolation {
 public:
  using DomainViolation::DomainViolation;
};

/// An integral diverges at a singular endpoint.
class NonIntegrableSingularity : public DomainViolation {
 public:
  NonIntegrableSingularity(const std::string& what, double exponent)
      : DomainViolation(what), exponent_(exponent) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

class ConditionFailed : public Error {
 public:
  using Error::Error;
};

/// Numerical procedures that could not reach their accuracy target.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class ToleranceNotMet : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class TruncationTooSmall : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class UnstableNullity : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace dissext
