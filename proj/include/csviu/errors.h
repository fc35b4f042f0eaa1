#pragma once

#include <stdexcept>
#include <string>

namespace csviu {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, inconsistent shapes, violated hypotheses.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to converge or detected divergence.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Lambda(U) = B'UB + Z_u(U) + D'D/alpha is not invertible.
class SingularLambda : public ValidationError {
 public:
  explicit SingularLambda(const std::string& where)
      : ValidationError(where +
                        ": Lambda(U) is singular; the control path requires "
                        "D'D to be positive definite") {}
};

class AssumptionViolated : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MaxIterations : public SolverError {
 public:
  MaxIterations(const std::string& what, int iterations, double residual)
      : SolverError(what + ": no convergence after " +
                    std::to_string(iterations) +
                    " iterations (last residual " + std::to_string(residual) +
                    ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class NoPsdSolution : public SolverError {
 public:
  using SolverError::SolverError;
};

class MonotonicityViolation : public SolverError {
 public:
  using SolverError::SolverError;
};

class SeriesDivergent : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace csviu
