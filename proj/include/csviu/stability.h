#pragma once

#include <cstdint>
#include <optional>

#include "csviu/model.h"
#include "csviu/operators.h"
#include "csviu/types.h"

namespace csviu {

/// The five equivalent alpha-stability conditions for the uncontrolled system,
/// each with its witness value. Strict inequalities are tested with a 1e-10
/// margin; values inside the band are `indeterminate`.
struct StabilityReport {
  double alpha = 1.0;

  // (i) (I - L^alpha)^{-1} maps I and sampled PSD probes to PSD matrices.
  Verdict inverse_positive = Verdict::indeterminate;
  double inverse_min_eigenvalue = 0.0;

  // (ii) r(L^alpha) < 1.
  Verdict d_stable = Verdict::indeterminate;
  double l_alpha_radius = 0.0;

  // (iii) U > 0 with (I - L^alpha)(U) > 0, U = (I - L^alpha)^{-1}(I).
  Verdict lyapunov = Verdict::indeterminate;
  std::optional<Matrix> lyapunov_witness;
  double witness_min_eigenvalue = 0.0;
  double residual_min_eigenvalue = 0.0;

  // (iv) sqrt(alpha) A is d-stable relative to alpha Z_x.
  Verdict relative_d_stable = Verdict::indeterminate;
  double relative_radius = 0.0;

  // (v) eig(sqrt(alpha) A) in the unit disk and r((I - alpha AA)^{-1} Z_x) < 1/alpha.
  Verdict eig_condition = Verdict::indeterminate;
  double sqrt_alpha_a_radius = 0.0;
  double resolvent_radius = 0.0;

  // Extra clause for alpha >= 1: eig(alpha A) in the open unit disk.
  std::optional<Verdict> alpha_a_in_disk;
  double alpha_a_radius = 0.0;

  Verdict overall = Verdict::indeterminate;

  /// True when no two conditions give opposite definite verdicts.
  bool conditions_agree() const;
};

StabilityReport check_alpha_stability(const SystemModel& model, double alpha,
                                      std::uint64_t probe_seed = 1);

struct DetectabilityResult {
  Verdict detectable = Verdict::indeterminate;
  double radius = 0.0;
};

/// r of U -> alpha((A+HC)'U(A+HC) + Z_x(U)) compared against 1.
DetectabilityResult check_detectability(const SystemModel& model, double alpha,
                                        const Matrix& H);

/// Heuristic witness search: scaled -A pinv(C), then random perturbations.
/// An empty result does not prove the pair undetectable.
std::optional<Matrix> detectability_search(const SystemModel& model,
                                           double alpha, int attempts,
                                           std::uint64_t seed = 7);

/// alpha(A+BG)'U(A+BG) + alpha Z_x(U) + alpha G'Z_u(U)G + (C+DG)'(C+DG).
Matrix h_alpha_g_step(const OperatorSet& ops, const Matrix& U, const Matrix& G);
/// L^alpha(U) + alpha [I;G]' [C'C/alpha, Sigma; Sigma', Lambda] [I;G].
Matrix h_alpha_g_block(const OperatorSet& ops, const Matrix& U, const Matrix& G);

struct ClosedLoopCheck {
  Verdict stabilizing = Verdict::indeterminate;
  double operator_radius = 0.0;
  double acl_radius = 0.0;
  /// Only evaluated when alpha > 1: r(A+BG) < 1/alpha.
  std::optional<Verdict> alpha_clause;
};

ClosedLoopCheck closed_loop_check(const SystemModel& model, double alpha,
                                  const Matrix& G);

}  // namespace csviu
