#pragma once

#include <cstdint>

#include "csviu/dynamics.h"
#include "csviu/riccati.h"
#include "csviu/types.h"

namespace csviu {

/// Approximation levels for the sign-dependent affine term of the optimal law.
enum class MuKind { zero, asymptotic, rollout };

const char* to_string(MuKind kind);
MuKind mu_kind_from_string(std::string_view name);

/// Which resolvent the frozen-sign formula uses.
enum class MuResolvent {
  series,  // alpha (I - alpha Acl')^{-1}, the sum of the defining series
  undiscounted,  // alpha (I - Acl)^{-1}
};

struct MuEstimate {
  Vector value;
  MuKind kind = MuKind::zero;
  Vector bound;
  /// Per-component standard error (rollout only; zero otherwise).
  Vector std_error;
  int paths = 0;
  int depth = 0;
  SignVector s_x;
  SignVector s_u;
};

/// Componentwise bound on |mu|. Throws SeriesDivergent when alpha r(Acl) >= 1.
Vector mu_bound(const RiccatiSolution& sol);

/// alpha (I - alpha Acl')^{-1} (W_x(L) s_x + G' W_u(L) s_u).
Vector mu_asymptotic(const RiccatiSolution& sol, const SignVector& s_x,
                     const SignVector& s_u,
                     MuResolvent resolvent = MuResolvent::series);

/// Smallest d with (alpha r(Acl))^d <= rel_tail.
int default_truncation_depth(const RiccatiSolution& sol, double rel_tail = 1e-6);

struct RolloutOptions {
  /// Negative selects default_truncation_depth.
  int depth = -1;
  int paths = 1000;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::gaussian;
  /// 0 estimates mu at x itself; 1 estimates the next-stage term
  /// E[v_{k+1} | x_k = x] used by the stage-k control.
  int first_stage = 0;
};

/// Monte Carlo average of the truncated series
///   sum_j alpha^{j+1} (Acl')^j (W_x(L) S(x_{j}) + G' W_u(L) S(u_{j}))
/// along closed-loop paths started at x under `policy`.
MuEstimate mu_rollout(const RiccatiSolution& sol, const Vector& x,
                      const PolicyFn& policy, const RolloutOptions& options);

}  // namespace csviu
