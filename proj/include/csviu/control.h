#pragma once

#include <memory>
#include <optional>

#include "csviu/mu.h"
#include "csviu/riccati.h"
#include "csviu/types.h"

namespace csviu {

/// Per-stage nonsmooth problem
///
///   minimize  J(u) = 1/2 u' W^{-1} u + <b, u> + <c, |u|>
///
/// whose optimality condition is the generalized normal equation
/// W^{-1} u + b + gamma = 0 with |gamma_i| <= c_i.
struct ControlSubproblem {
  Matrix W;  // positive definite, m x m
  Matrix W_inverse;
  Vector b;
  Vector c;  // nonnegative
  Vector x;
  Vector mu;

  int m() const { return static_cast<int>(b.size()); }

  /// W = (2 quad)^{-1}, i.e. J(u) = u' quad u + <b,u> + <c,|u|>.
  static ControlSubproblem from_quadratic(const Matrix& quad, const Vector& b,
                                          const Vector& c);
};

struct SorState {
  Vector z;
  Vector gamma;
  Vector nu;
  Vector theta;
  int iterations = 0;
  double residual = 0.0;  // |nu + W (gamma + b)|_inf
};

/// Builds the stage problem at state x with next-stage term mu:
/// quad = alpha Lambda(L), b = alpha (B' mu + 2 Sigma(L) x), c = alpha W_ud(L).
ControlSubproblem build_subproblem(const RiccatiSolution& sol, const Vector& x,
                                   const Vector& mu);

double cost_Ju(const ControlSubproblem& sub, const Vector& u);

/// Which iterate carries the (1 - omega) relaxation memory.
enum class SorMemory {
  /// z_i <- (1 - omega) z_i - omega/W_ii sum_{j != i} W_ij (gamma_j + b_j) - omega b_i,
  /// gamma = clip(z, c). Identical to `multiplier` at omega = 1; can cycle for
  /// omega close to 2.
  state,
  /// gamma_i <- clip((1 - omega) gamma_i + omega t_i, c) with t_i the
  /// Gauss-Seidel target; z keeps t. Classical projected SOR.
  multiplier,
};

const char* to_string(SorMemory memory);

/// Successive over-relaxation on the multiplier gamma. Sweeps i = 1..m in
/// place; stops once |nu + W(gamma + b)|_inf <= tol.
SorState sor_solve(const ControlSubproblem& sub, double omega, const Vector& z0,
                   double tol = 1e-12, int max_iters = 100000,
                   SorMemory memory = SorMemory::state);

struct ControlOptions {
  MuKind mu_kind = MuKind::asymptotic;
  double omega = 1.0;
  SorMemory sor_memory = SorMemory::state;
  double tol = 1e-12;
  int max_iters = 100000;
  /// Fixed-point sweeps on the control sign pattern for the asymptotic mu.
  int sign_sweeps = 3;
  RolloutOptions rollout;
  MuResolvent resolvent = MuResolvent::series;
};

struct OptimalControl {
  Vector u_star;
  /// Multiplier of the stage problem; |gamma_i| <= c_i = alpha W_ud(L)_i.
  Vector gamma_star;
  Vector mu;
  SorState sor;
  ControlSubproblem sub;
};

/// Evaluates the optimal feedback law with cached Riccati data. Copies the
/// solution it is built from.
class ControlLaw {
 public:
  explicit ControlLaw(RiccatiSolution sol, ControlOptions options = {});

  const RiccatiSolution& solution() const { return *sol_; }
  const ControlOptions& options() const { return options_; }

  /// Solves the stage problem for a given next-stage term.
  OptimalControl solve(const Vector& x, const Vector& mu) const;
  /// Chooses mu with the configured estimator, then solves.
  OptimalControl solve(const Vector& x) const;

  Vector operator()(const Vector& x) const { return solve(x).u_star; }

 private:
  std::shared_ptr<const RiccatiSolution> sol_;
  ControlOptions options_;
  Eigen::LDLT<Matrix> lambda_;
};

/// One-shot convenience over ControlLaw.
OptimalControl optimal_control(const RiccatiSolution& sol, const Vector& x,
                               const ControlOptions& options = {});

/// rho(u) = alpha |u - u0|^2_Lambda - alpha/4 |B'mu + W_u(L) S(u)|^2_{Lambda^{-1}},
/// u0 = -Lambda^{-1}(Sigma x + (B'mu + W_u(L) S(u)) / 2).
double rho_stage(const RiccatiSolution& sol, const Vector& x, const Vector& u,
                 const Vector& mu);
Vector rho_center(const RiccatiSolution& sol, const Vector& x, const Vector& u,
                  const Vector& mu);

struct RhoMin {
  double rho = 0.0;
  Vector u0;
  Vector u_star;
};

RhoMin rho_min(const ControlLaw& law, const Vector& x, const Vector& mu);

struct InactionResult {
  bool inactive = false;
  double margin = 0.0;
};

/// |2 <Sigma(L)_i, x> + <B_i, mu>| < W_ud(L)_i, margin = rhs - lhs.
InactionResult inaction_test(const RiccatiSolution& sol, const Vector& x,
                             const Vector& mu, int channel);

/// Margin of channel i given the other channels' optimal controls, in the same
/// units as inaction_test:  (c_i - |b_i + sum_{j != i} (W^{-1})_ij u_j|) / alpha.
/// Positive exactly when u_i = 0 is strictly optimal; equals the inaction_test
/// margin when every other channel is zero or W is diagonal.
double coupled_inaction_margin(const ControlSubproblem& sub, const Vector& u,
                               int channel, double alpha);

}  // namespace csviu
