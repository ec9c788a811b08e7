#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratetol {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a type invariant (bad distribution, shape mismatch, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// KL divergence where p puts mass outside the support of q.
class SupportMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Q(A_j) = 0 where a logical probability must be positive.
class ZeroLogicalProbabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidPriorError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AllZeroRowError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A tolerance ball came out empty for some source symbol.
class EmptyBallError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Structure function requested on a cover whose balls differ in size.
class UnequalBallError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Some source row can reach no output with positive weight.
class NoFeasibleOutputError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double slope, std::size_t iterations)
      : Error(what), slope_(slope), iterations_(iterations) {}

  double slope() const noexcept { return slope_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double slope_;
  std::size_t iterations_;
};

}  // namespace ratetol
