#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csviu/control.h"
#include "csviu/dynamics.h"
#include "csviu/model.h"
#include "csviu/riccati.h"

namespace csviu {

enum class PolicyKind { zero, linear, optimal, custom };

const char* to_string(PolicyKind kind);

/// Deterministic feedback x -> u.
class Policy {
 public:
  static Policy zero(int m);
  static Policy linear(Matrix G);
  static Policy optimal(std::shared_ptr<const ControlLaw> law);
  static Policy custom(PolicyFn fn, int m, std::string label = "custom");

  PolicyKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  int m() const { return m_; }
  /// Set for optimal policies.
  const ControlLaw* law() const { return law_.get(); }

  Vector operator()(const Vector& x) const;
  PolicyFn function() const { return fn_; }

 private:
  PolicyKind kind_ = PolicyKind::zero;
  std::string label_;
  int m_ = 0;
  PolicyFn fn_;
  std::shared_ptr<const ControlLaw> law_;
};

struct SimulationConfig {
  int kappa = 100;
  int paths = 1000;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::gaussian;
};

/// Full trajectories of a batch of paths.
struct PathEnsemble {
  int kappa = 0;
  std::uint64_t seed = 0;
  std::vector<Matrix> states;   // per path: (kappa+1) x n
  std::vector<Matrix> controls;  // per path: kappa x m
  std::vector<Matrix> outputs;   // per path: kappa x p
  std::vector<double> discounted_cost;  // sum_{k<kappa} alpha^k |y_k|^2
};

PathEnsemble simulate(const SystemModel& model, const Policy& policy,
                      const Vector& x0, double alpha,
                      const SimulationConfig& config);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int paths = 0;
};

struct EnergyRow {
  int kappa = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// E[sum_{k=0}^{kappa} alpha^k |y_k|^2] for every kappa up to config.kappa.
std::vector<EnergyRow> energy_table(const SystemModel& model,
                                    const Policy& policy, double alpha,
                                    const Vector& x0,
                                    const SimulationConfig& config);

McEstimate estimate_energy(const SystemModel& model, const Policy& policy,
                           double alpha, const Vector& x0,
                           const SimulationConfig& config);

struct PowerEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int paths = 0;
  /// Mean |y_k|^2 over the last quarter exceeds twice that of the third
  /// quarter, or the iterates overflowed.
  bool growth = false;
  /// |C(kappa) - C(3 kappa / 4)| / C(kappa) for the Cesaro average C.
  double cesaro_drift = 0.0;
  /// Same drift for the Cesaro average of |x_k|^2.
  double state_cesaro_drift = 0.0;
  double state_mean = 0.0;
};

/// (1/kappa) sum_{k<kappa} E|y_k|^2. The standard error is taken across
/// independent paths, or from 20 batch means when a single path is run.
PowerEstimate estimate_power(const SystemModel& model, const Policy& policy,
                             const Vector& x0, const SimulationConfig& config);

struct VariationInput {
  Matrix P;       // P_k
  Matrix P_next;  // P_{k+1}
  Vector r;       // r_k
  Vector r_next;  // r_{k+1}
  double g = 0.0;
  double g_next = 0.0;
};

struct VariationResult {
  double lhs_mc = 0.0;
  double rhs_closed = 0.0;
  double std_error = 0.0;  // combined
  Vector mu_next;          // estimate of E[r_{k+1} . S(x_{k+1}) | x_k]
  /// alpha E[<r_{k+1} . S(x_{k+1}), x_{k+1} - A x - B u>], the part of the
  /// left side that the closed form drops when r_{k+1} != 0.
  double sign_noise_term = 0.0;
  double sign_noise_std_error = 0.0;
};

/// Monte Carlo check of the expected one-step variation of
///   V(k, x) = alpha^k (x' P_k x + <r_k, |x|> + g_k).
/// The next-stage term mu_{k+1} in the closed form is estimated from a stream
/// independent of the left side's.
VariationResult one_step_variation_oracle(const SystemModel& model,
                                          double alpha, const Vector& x,
                                          const Vector& u,
                                          const VariationInput& in, int paths,
                                          std::uint64_t seed,
                                          NoiseKind noise = NoiseKind::gaussian);

/// Closed form of the expected variation for a given mu_{k+1}.
double one_step_variation_closed(const SystemModel& model, double alpha,
                                 const Vector& x, const Vector& u,
                                 const VariationInput& in, const Vector& mu_next);

struct NormsConfig {
  int paths = 1000;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::gaussian;
  /// Truncation horizon; by default the smallest d with alpha^d <= tail
  /// (alpha < 1) or 4000 stages (alpha = 1).
  std::optional<int> kappa;
  double tail = 1e-6;
  ControlOptions control;
};

struct NormsResult {
  double varpi1 = 0.0;
  int kappa = 0;
  int paths = 0;
  /// alpha/(1-alpha) varpi_1(L) + sum_k alpha^k E[rho_k | x_0 = 0].
  std::optional<double> energy_alpha;
  std::optional<double> energy_std_error;
  /// varpi_1(L) + lim E[rho_k], the limit taken as the mean over the last
  /// quarter of the horizon.
  std::optional<double> power;
  std::optional<double> power_std_error;
  /// The same norms through the exact stage decomposition
  ///   |y|^2 = alpha varpi_1 + q + (martingale and telescoping terms),
  ///   q = alpha (|u - Gx|^2_Lambda + <W_ud, |u|> + <W_xd, |x|>).
  std::optional<double> energy_exact;
  std::optional<double> energy_exact_std_error;
  std::optional<double> power_exact;
  std::optional<double> power_exact_std_error;
  /// Geometric tail bound on the truncated sums.
  double tail_bound = 0.0;
  double max_abs_rho = 0.0;
  std::vector<double> mean_rho;  // E[rho_k] per stage
};

/// Optimal energy (alpha < 1) or power (alpha = 1) norms estimated along
/// simulated optimal closed-loop paths from x_0 = 0. Throws SeriesDivergent
/// when the stage averages do not settle on the second half of the horizon.
NormsResult optimal_norms(const RiccatiSolution& sol, const NormsConfig& config);

struct OvertakingRow {
  int kappa = 0;
  /// E^{alpha,kappa}(a) - E^{alpha,kappa}(b), scaled by alpha^{-kappa}.
  double scaled_difference = 0.0;
  double scaled_std_error = 0.0;
  /// Unscaled difference; may be infinite for long horizons.
  double difference = 0.0;
  double std_error = 0.0;
};

/// Finite-horizon cost differences under common random numbers.
std::vector<OvertakingRow> overtaking_compare(
    const SystemModel& model, double alpha, const Policy& policy_a,
    const Policy& policy_b, const Vector& x0, const std::vector<int>& kappa_grid,
    int paths, std::uint64_t seed, NoiseKind noise = NoiseKind::gaussian);

/// Bookkeeping for the scalar part of the value function.
struct CostLedger {
  double alpha = 1.0;
  double varpi1 = 0.0;
  std::vector<double> rho;
  std::vector<double> g;  // g_0..g_N with g_N = 0
  double tail_bound = 0.0;

  /// x' P x + <r, |x|> + g_k.
  double value(const Matrix& P, const Vector& r, const Vector& x, int k) const;
  /// max_k |alpha g_{k+1} + alpha varpi_1 + rho_k - g_k|.
  double residual() const;
};

/// g_k = alpha g_{k+1} + alpha varpi_1 + rho_k, rolled back from g_N = 0.
CostLedger roll_cost_ledger(double alpha, double varpi1,
                            const std::vector<double>& rho);

struct StabilizationCheck {
  double alpha = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  Vector zeta;
  std::vector<int> kappa;
  std::vector<double> energy;  // E[sum_{k<kappa} alpha^k |y_k|^2]
  std::vector<double> energy_std_error;
  std::vector<double> bound;   // c0 |x0 - zeta|^2 + kappa c1 alpha^kappa
  bool bound_holds = false;    // energy <= bound + 3 std_error everywhere
  double state_cesaro_drift = 0.0;
  double max_abs_rho = 0.0;
};

/// Simulates the optimal closed loop from x0 and evaluates the growth bound
/// with c0 = lambda_max(L) and c1 = alpha (varpi_1(L) + max |rho_k|).
StabilizationCheck stabilization_check(const ControlLaw& law, const Vector& x0,
                                       const SimulationConfig& config);

}  // namespace csviu
