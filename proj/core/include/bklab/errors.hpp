#pragma once

#include <stdexcept>
#include <string>

namespace bklab {

/// An argument lies outside the domain of the requested operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not produce a result to the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bracketed root-finding failed; carries the final bracket and the residuals
/// observed at its ends.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double lo, double hi, double f_lo,
                   double f_hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double f_lo() const noexcept { return f_lo_; }
  double f_hi() const noexcept { return f_hi_; }

 private:
  double lo_;
  double hi_;
  double f_lo_;
  double f_hi_;
};

/// Reading or writing a report failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotTGood : public DomainError {
 public:
  using DomainError::DomainError;
};

class FamilyNotInSPhi : public DomainError {
 public:
  using DomainError::DomainError;
};

class FamilyNotMaximal : public DomainError {
 public:
  using DomainError::DomainError;
};

class InfeasibleStart : public DomainError {
 public:
  using DomainError::DomainError;
};

class ComplexityGuard : public DomainError {
 public:
  using DomainError::DomainError;
};

class RefinementTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bklab
