#pragma once

#include <optional>
#include <vector>

#include "csviu/model.h"
#include "csviu/operators.h"
#include "csviu/types.h"

namespace csviu {

struct RiccatiOptions {
  /// Elementwise sup-norm change between iterates.
  double tol = 1e-11;
  int max_iters = 200000;
  /// Abort when |P_k| exceeds this multiple of max(1, |P_1|).
  double divergence_factor = 1e6;
  /// Successive differences must have min eigenvalue >= -monotone_tol.
  double monotone_tol = 1e-10;
};

/// Minimal PSD fixed point of Ric^alpha reached by value iteration from zero,
/// plus the feedback data derived from it.
struct RiccatiSolution {
  SystemModel model;
  double alpha = 1.0;
  Matrix L;    // n x n fixed point
  Matrix G;    // m x n gain, -Lambda(L)^{-1} Sigma(L)
  Matrix Acl;  // A + B G
  Matrix Sigma;   // Sigma(L), m x n
  Matrix Lambda;  // Lambda(L), m x m
  NoiseForms forms;  // noise operators at L
  int iterations = 0;
  double residual = 0.0;  // |Ric(L) - L|_inf
  double acl_radius = 0.0;
  /// r(Acl) < 1/alpha when alpha > 1; true otherwise.
  bool alpha_condition_ok = true;
  std::optional<bool> detectable_ok;
};

/// Throws ValidationError when D'D is not positive definite, MaxIterations,
/// NoPsdSolution on growth, MonotonicityViolation on loss of PSD order.
RiccatiSolution solve_riccati(const SystemModel& model, double alpha,
                              const RiccatiOptions& options = {});

/// Fills gain, closed loop and the operator values at a given fixed point L.
RiccatiSolution complete_solution(const SystemModel& model, double alpha,
                                  const Matrix& L);

/// P_0..P_kappa with P_kappa = 0 and P_k = Ric(P_{k+1}).
std::vector<Matrix> finite_horizon_riccati(const SystemModel& model,
                                           double alpha, int kappa);

/// Gain -Lambda(U)^{-1} Sigma(U).
Matrix feedback_gain(const OperatorSet& ops, const Matrix& U);

}  // namespace csviu
