#include "csviu/simulator.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "csviu/errors.h"
#include "csviu/noise.h"
#include "csviu/operators.h"

namespace csviu {
namespace {

// Welford accumulator; samples are added in path order.
struct Running {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double std_error() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void require_config(const SimulationConfig& config, const char* where) {
  if (config.kappa < 0) {
    throw ValidationError(std::string(where) + ": kappa must be >= 0");
  }
  if (config.paths < 1) {
    throw ValidationError(std::string(where) + ": paths must be >= 1");
  }
}

void require_state(const SystemModel& model, const Vector& x0,
                   const char* where) {
  if (x0.size() != model.n()) {
    throw ValidationError(std::string(where) + ": x0 must have n entries");
  }
  if (!x0.allFinite()) {
    throw ValidationError(std::string(where) + ": x0 is not finite");
  }
}

std::uint64_t independent_seed(std::uint64_t seed) {
  return seed ^ 0xD1B54A32D192ED03ULL;
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::zero:
      return "zero";
    case PolicyKind::linear:
      return "linear";
    case PolicyKind::optimal:
      return "optimal";
    case PolicyKind::custom:
      return "custom";
  }
  return "unknown";
}

Policy Policy::zero(int m) {
  Policy p;
  p.kind_ = PolicyKind::zero;
  p.label_ = "zero";
  p.m_ = m;
  p.fn_ = [m](const Vector&) -> Vector { return Vector::Zero(m); };
  return p;
}

Policy Policy::linear(Matrix G) {
  Policy p;
  p.kind_ = PolicyKind::linear;
  p.label_ = "linear";
  p.m_ = static_cast<int>(G.rows());
  p.fn_ = [G = std::move(G)](const Vector& x) -> Vector { return G * x; };
  return p;
}

Policy Policy::optimal(std::shared_ptr<const ControlLaw> law) {
  if (!law) throw ValidationError("Policy::optimal: null control law");
  Policy p;
  p.kind_ = PolicyKind::optimal;
  p.label_ = std::string("optimal/") + to_string(law->options().mu_kind);
  p.m_ = law->solution().model.m();
  p.law_ = law;
  p.fn_ = [law](const Vector& x) -> Vector { return (*law)(x); };
  return p;
}

Policy Policy::custom(PolicyFn fn, int m, std::string label) {
  if (!fn) throw ValidationError("Policy::custom: empty function");
  Policy p;
  p.kind_ = PolicyKind::custom;
  p.label_ = std::move(label);
  p.m_ = m;
  p.fn_ = std::move(fn);
  return p;
}

Vector Policy::operator()(const Vector& x) const {
  Vector u = fn_(x);
  if (u.size() != m_) {
    throw ValidationError("policy '" + label_ + "' returned a control of size " +
                          std::to_string(u.size()) + ", expected " +
                          std::to_string(m_));
  }
  return u;
}

PathEnsemble simulate(const SystemModel& model, const Policy& policy,
                      const Vector& x0, double alpha,
                      const SimulationConfig& config) {
  require_config(config, "simulate");
  require_state(model, x0, "simulate");
  const int n = model.n(), m = model.m(), p = model.p();
  PathEnsemble ens;
  ens.kappa = config.kappa;
  ens.seed = config.seed;
  ens.states.reserve(config.paths);
  ens.controls.reserve(config.paths);
  ens.outputs.reserve(config.paths);
  ens.discounted_cost.reserve(config.paths);
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Matrix X(config.kappa + 1, n), U(config.kappa, m), Y(config.kappa, p);
    Vector x = x0;
    X.row(0) = x.transpose();
    CompensatedSum cost;
    double weight = 1.0;
    for (int k = 0; k < config.kappa; ++k) {
      const Vector u = policy(x);
      const StepResult s =
          step(model, x, u, draw_noise(rng, k, model, config.noise));
      U.row(k) = u.transpose();
      Y.row(k) = s.y.transpose();
      cost.add(weight * s.y.squaredNorm());
      weight *= alpha;
      x = s.x_next;
      X.row(k + 1) = x.transpose();
    }
    ens.states.push_back(std::move(X));
    ens.controls.push_back(std::move(U));
    ens.outputs.push_back(std::move(Y));
    ens.discounted_cost.push_back(cost.value());
  }
  return ens;
}

std::vector<EnergyRow> energy_table(const SystemModel& model,
                                    const Policy& policy, double alpha,
                                    const Vector& x0,
                                    const SimulationConfig& config) {
  require_config(config, "energy_table");
  require_state(model, x0, "energy_table");
  std::vector<Running> rows(config.kappa + 1);
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Vector x = x0;
    CompensatedSum cost;
    double weight = 1.0;
    for (int k = 0; k <= config.kappa; ++k) {
      const Vector u = policy(x);
      if (k < config.kappa) {
        const StepResult s =
            step(model, x, u, draw_noise(rng, k, model, config.noise));
        cost.add(weight * s.y.squaredNorm());
        x = s.x_next;
      } else {
        cost.add(weight * (model.C * x + model.D * u).squaredNorm());
      }
      rows[k].add(cost.value());
      weight *= alpha;
    }
  }
  std::vector<EnergyRow> out(config.kappa + 1);
  for (int k = 0; k <= config.kappa; ++k) {
    out[k] = {k, rows[k].mean, rows[k].std_error()};
  }
  return out;
}

McEstimate estimate_energy(const SystemModel& model, const Policy& policy,
                           double alpha, const Vector& x0,
                           const SimulationConfig& config) {
  require_config(config, "estimate_energy");
  require_state(model, x0, "estimate_energy");
  Running acc;
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Vector x = x0;
    CompensatedSum cost;
    double weight = 1.0;
    for (int k = 0; k < config.kappa; ++k) {
      const Vector u = policy(x);
      const StepResult s =
          step(model, x, u, draw_noise(rng, k, model, config.noise));
      cost.add(weight * s.y.squaredNorm());
      weight *= alpha;
      x = s.x_next;
    }
    // y_kappa needs no noise draw.
    cost.add(weight * (model.C * x + model.D * policy(x)).squaredNorm());
    acc.add(cost.value());
  }
  return {acc.mean, acc.std_error(), config.paths};
}

PowerEstimate estimate_power(const SystemModel& model, const Policy& policy,
                             const Vector& x0, const SimulationConfig& config) {
  require_config(config, "estimate_power");
  require_state(model, x0, "estimate_power");
  if (config.kappa < 4) {
    throw ValidationError("estimate_power: kappa must be >= 4");
  }
  const int K = config.kappa;
  std::vector<double> stage_y(K, 0.0), stage_x(K, 0.0);
  Running across;
  std::vector<double> single_path;  // |y_k|^2 when only one path runs
  if (config.paths == 1) single_path.reserve(K);
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Vector x = x0;
    CompensatedSum total;
    for (int k = 0; k < K; ++k) {
      const Vector u = policy(x);
      const StepResult s =
          step(model, x, u, draw_noise(rng, k, model, config.noise));
      const double y2 = s.y.squaredNorm();
      total.add(y2);
      stage_y[k] += y2;
      stage_x[k] += x.squaredNorm();
      if (config.paths == 1) single_path.push_back(y2);
      x = s.x_next;
    }
    across.add(total.value() / K);
  }

  PowerEstimate out;
  out.paths = config.paths;
  out.mean = across.mean;
  if (config.paths > 1) {
    out.std_error = across.std_error();
  } else {
    const int batches = 20;
    const int len = K / batches;
    Running bm;
    for (int b = 0; b < batches && len > 0; ++b) {
      double s = 0.0;
      for (int k = b * len; k < (b + 1) * len; ++k) s += single_path[k];
      bm.add(s / len);
    }
    out.std_error = bm.std_error();
  }

  auto quarter_mean = [&](const std::vector<double>& v, int q) {
    const int lo = q * K / 4, hi = (q + 1) * K / 4;
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += v[k];
    return s / std::max(1, hi - lo);
  };
  auto cesaro_drift = [&](const std::vector<double>& v) {
    double head = 0.0;
    const int three = 3 * K / 4;
    for (int k = 0; k < three; ++k) head += v[k];
    double all = head;
    for (int k = three; k < K; ++k) all += v[k];
    const double c_all = all / K, c_head = head / std::max(1, three);
    if (c_all == 0.0) return 0.0;
    return std::abs(c_all - c_head) / std::abs(c_all);
  };
  const double q3 = quarter_mean(stage_y, 2), q4 = quarter_mean(stage_y, 3);
  out.growth = !std::isfinite(out.mean) || !std::isfinite(q4) || q4 > 2.0 * q3;
  out.cesaro_drift = cesaro_drift(stage_y);
  out.state_cesaro_drift = cesaro_drift(stage_x);
  double sx = 0.0;
  for (double v : stage_x) sx += v;
  out.state_mean = sx / (static_cast<double>(K) * config.paths);
  if (!std::isfinite(out.cesaro_drift)) out.growth = true;
  return out;
}

double one_step_variation_closed(const SystemModel& model, double alpha,
                                 const Vector& x, const Vector& u,
                                 const VariationInput& in,
                                 const Vector& mu_next) {
  const OperatorSet ops(model, alpha);
  const NoiseForms f = ops.noise_quadratic_forms(in.P_next);
  const SigmaLambda sl = ops.sigma_lambda(in.P_next);
  const Vector sx = sign_vector(x).cast<double>();
  const Vector su = sign_vector(u).cast<double>();
  const Vector mu_k = in.r.cwiseProduct(sx);
  const Matrix quad = ops.lyapunov_step(in.P_next) +
                      model.C.transpose() * model.C - in.P;
  double v = x.dot(quad * x);
  v += alpha * u.dot(sl.Lambda * u);
  v += (alpha * model.A.transpose() * mu_next +
        alpha * f.Wx_d().cwiseProduct(sx) - mu_k)
           .dot(x);
  v += alpha *
       (model.B.transpose() * mu_next + f.Wu * su + 2.0 * sl.Sigma * x).dot(u);
  v += alpha * in.g_next + alpha * f.varpi1 - in.g;
  return v;
}

VariationResult one_step_variation_oracle(const SystemModel& model,
                                          double alpha, const Vector& x,
                                          const Vector& u,
                                          const VariationInput& in, int paths,
                                          std::uint64_t seed, NoiseKind noise) {
  const int n = model.n();
  if (x.size() != n || u.size() != model.m()) {
    throw ValidationError("one_step_variation_oracle: x or u has wrong size");
  }
  if (in.P.rows() != n || in.P_next.rows() != n || in.r.size() != n ||
      in.r_next.size() != n) {
    throw ValidationError("one_step_variation_oracle: P or r has wrong size");
  }
  if (paths < 2) {
    throw ValidationError("one_step_variation_oracle: paths must be >= 2");
  }
  const Vector drift = model.A * x + model.B * u;
  const double v_now =
      x.dot(in.P * x) + in.r.dot(x.cwiseAbs()) + in.g;

  Running lhs, sign_noise;
  for (int path = 0; path < paths; ++path) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(path));
    const StepResult s = step(model, x, u, draw_noise(rng, 0, model, noise));
    const Vector& xn = s.x_next;
    const double v_next =
        xn.dot(in.P_next * xn) + in.r_next.dot(xn.cwiseAbs()) + in.g_next;
    lhs.add(alpha * v_next - v_now + s.y.squaredNorm());
    const Vector signed_r = in.r_next.cwiseProduct(sign_vector(xn).cast<double>());
    sign_noise.add(alpha * signed_r.dot(xn - drift));
  }

  // mu_{k+1} from an independent stream.
  Vector mu_mean = Vector::Zero(n);
  Running mu_term;
  const std::uint64_t mu_seed = independent_seed(seed);
  for (int path = 0; path < paths; ++path) {
    const CounterRng rng(mu_seed, static_cast<std::uint64_t>(path));
    const StepResult s = step(model, x, u, draw_noise(rng, 0, model, noise));
    const Vector v = in.r_next.cwiseProduct(sign_vector(s.x_next).cast<double>());
    mu_mean += (v - mu_mean) / static_cast<double>(path + 1);
    mu_term.add(alpha * v.dot(drift));
  }

  VariationResult out;
  out.mu_next = mu_mean;
  out.lhs_mc = lhs.mean;
  out.rhs_closed = one_step_variation_closed(model, alpha, x, u, in, mu_mean);
  out.std_error = std::hypot(lhs.std_error(), mu_term.std_error());
  out.sign_noise_term = sign_noise.mean;
  out.sign_noise_std_error = sign_noise.std_error();
  return out;
}

NormsResult optimal_norms(const RiccatiSolution& sol, const NormsConfig& config) {
  const double alpha = sol.alpha;
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError(
        "optimal_norms: the energy norm needs alpha < 1 and the power norm "
        "alpha = 1");
  }
  if (config.paths < 2) throw ValidationError("optimal_norms: paths must be >= 2");
  const bool power = alpha == 1.0;
  int kappa = 0;
  if (config.kappa) {
    kappa = *config.kappa;
  } else if (power) {
    kappa = 4000;
  } else {
    kappa = static_cast<int>(std::ceil(std::log(config.tail) / std::log(alpha)));
  }
  if (kappa < 8) throw ValidationError("optimal_norms: horizon must be >= 8");

  const ControlLaw law(sol, config.control);
  const SystemModel& model = sol.model;
  const int n = model.n();
  const Vector Wud = sol.forms.Wu_d();
  const Vector Wxd = sol.forms.Wx_d();

  NormsResult out;
  out.varpi1 = sol.forms.varpi1;
  out.kappa = kappa;
  out.paths = config.paths;
  out.mean_rho.assign(kappa, 0.0);

  Running disc_rho, disc_q;         // energy branch
  Running last_rho, last_q, window;  // power branch
  const int q3 = kappa / 2, q4 = 3 * kappa / 4;
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Vector x = Vector::Zero(n);
    CompensatedSum srho, sq;
    double tail_rho = 0.0, tail_q = 0.0, third_rho = 0.0;
    double weight = 1.0;
    for (int k = 0; k < kappa; ++k) {
      const OptimalControl oc = law.solve(x);
      const Vector& u = oc.u_star;
      const double rho = rho_stage(sol, x, u, oc.mu);
      const Vector d = u - sol.G * x;
      const double q = alpha * (d.dot(sol.Lambda * d) + Wud.dot(u.cwiseAbs()) +
                                Wxd.dot(x.cwiseAbs()));
      if (!std::isfinite(rho) || !std::isfinite(q)) {
        throw SeriesDivergent("optimal_norms: stage cost is not finite");
      }
      out.mean_rho[k] += rho;
      out.max_abs_rho = std::max(out.max_abs_rho, std::abs(rho));
      srho.add(weight * rho);
      sq.add(weight * q);
      if (k >= q4) {
        tail_rho += rho;
        tail_q += q;
      } else if (k >= q3) {
        third_rho += rho;
      }
      weight *= alpha;
      x = step(model, x, u, draw_noise(rng, k, model, config.noise)).x_next;
    }
    disc_rho.add(srho.value());
    disc_q.add(sq.value());
    const double len4 = kappa - q4, len3 = q4 - q3;
    last_rho.add(tail_rho / len4);
    last_q.add(tail_q / len4);
    window.add(tail_rho / len4 - third_rho / len3);
  }
  for (double& v : out.mean_rho) v /= config.paths;

  if (power) {
    const double scale = std::abs(out.varpi1) + std::abs(last_rho.mean);
    if (std::abs(window.mean) > 5.0 * window.std_error() + 1e-2 * scale) {
      std::ostringstream msg;
      msg << "optimal_norms: stage averages of rho drift between the last two "
             "quarters of the horizon ("
          << window.mean << " +- " << window.std_error() << ")";
      throw SeriesDivergent(msg.str());
    }
    out.power = out.varpi1 + last_rho.mean;
    out.power_std_error = last_rho.std_error();
    out.power_exact = out.varpi1 + last_q.mean;
    out.power_exact_std_error = last_q.std_error();
  } else {
    const double base = alpha / (1.0 - alpha) * out.varpi1;
    out.energy_alpha = base + disc_rho.mean;
    out.energy_std_error = disc_rho.std_error();
    out.energy_exact = base + disc_q.mean;
    out.energy_exact_std_error = disc_q.std_error();
    out.tail_bound = std::pow(alpha, kappa) *
                     (alpha * out.varpi1 + out.max_abs_rho) / (1.0 - alpha);
  }
  return out;
}

std::vector<OvertakingRow> overtaking_compare(
    const SystemModel& model, double alpha, const Policy& policy_a,
    const Policy& policy_b, const Vector& x0, const std::vector<int>& kappa_grid,
    int paths, std::uint64_t seed, NoiseKind noise) {
  require_state(model, x0, "overtaking_compare");
  if (!(alpha > 0.0)) throw ValidationError("overtaking_compare: alpha <= 0");
  if (paths < 1) throw ValidationError("overtaking_compare: paths < 1");
  int kmax = 0;
  for (int k : kappa_grid) {
    if (k < 0) throw ValidationError("overtaking_compare: negative kappa");
    kmax = std::max(kmax, k);
  }
  std::vector<Running> scaled(kappa_grid.size());
  std::vector<double> ya(kmax + 1), yb(kmax + 1);

  auto run = [&](const Policy& policy, const CounterRng& rng,
                 std::vector<double>& y2) {
    Vector x = x0;
    for (int k = 0; k <= kmax; ++k) {
      const Vector u = policy(x);
      if (k < kmax) {
        const StepResult s = step(model, x, u, draw_noise(rng, k, model, noise));
        y2[k] = s.y.squaredNorm();
        x = s.x_next;
      } else {
        y2[k] = (model.C * x + model.D * u).squaredNorm();
      }
    }
  };
  const double log_alpha = std::log(alpha);
  for (int path = 0; path < paths; ++path) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(path));
    run(policy_a, rng, ya);
    run(policy_b, rng, yb);
    for (std::size_t g = 0; g < kappa_grid.size(); ++g) {
      const int K = kappa_grid[g];
      CompensatedSum diff;
      for (int k = 0; k <= K; ++k) {
        diff.add(std::exp((k - K) * log_alpha) * (ya[k] - yb[k]));
      }
      scaled[g].add(diff.value());
    }
  }
  std::vector<OvertakingRow> rows(kappa_grid.size());
  for (std::size_t g = 0; g < kappa_grid.size(); ++g) {
    const int K = kappa_grid[g];
    const double factor = std::exp(K * log_alpha);
    rows[g].kappa = K;
    rows[g].scaled_difference = scaled[g].mean;
    rows[g].scaled_std_error = scaled[g].std_error();
    rows[g].difference = factor * scaled[g].mean;
    rows[g].std_error = factor * scaled[g].std_error();
  }
  return rows;
}

double CostLedger::value(const Matrix& P, const Vector& r, const Vector& x,
                         int k) const {
  if (k < 0 || k >= static_cast<int>(g.size())) {
    throw ValidationError("CostLedger::value: stage out of range");
  }
  return x.dot(P * x) + r.dot(x.cwiseAbs()) + g[k];
}

double CostLedger::residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    worst = std::max(worst, std::abs(alpha * g[k + 1] + alpha * varpi1 +
                                     rho[k] - g[k]));
  }
  return worst;
}

CostLedger roll_cost_ledger(double alpha, double varpi1,
                            const std::vector<double>& rho) {
  CostLedger ledger;
  ledger.alpha = alpha;
  ledger.varpi1 = varpi1;
  ledger.rho = rho;
  const std::size_t N = rho.size();
  ledger.g.assign(N + 1, 0.0);
  double max_rho = 0.0;
  for (std::size_t k = N; k-- > 0;) {
    ledger.g[k] = alpha * ledger.g[k + 1] + alpha * varpi1 + rho[k];
    max_rho = std::max(max_rho, std::abs(rho[k]));
  }
  if (alpha < 1.0) {
    ledger.tail_bound = std::pow(alpha, static_cast<double>(N)) *
                        (alpha * std::abs(varpi1) + max_rho) / (1.0 - alpha);
  } else {
    ledger.tail_bound = std::numeric_limits<double>::infinity();
  }
  return ledger;
}

StabilizationCheck stabilization_check(const ControlLaw& law, const Vector& x0,
                                       const SimulationConfig& config) {
  require_config(config, "stabilization_check");
  const RiccatiSolution& sol = law.solution();
  const SystemModel& model = sol.model;
  require_state(model, x0, "stabilization_check");
  if (config.kappa < 4) {
    throw ValidationError("stabilization_check: kappa must be >= 4");
  }
  const double alpha = sol.alpha;
  const int K = config.kappa;
  const int n = model.n();

  StabilizationCheck out;
  out.alpha = alpha;
  std::vector<Running> energy(K + 1);
  std::vector<double> stage_x(K, 0.0);
  for (int path = 0; path < config.paths; ++path) {
    const CounterRng rng(config.seed, static_cast<std::uint64_t>(path));
    Vector x = x0;
    CompensatedSum cost;
    energy[0].add(0.0);
    double weight = 1.0;
    for (int k = 0; k < K; ++k) {
      const OptimalControl oc = law.solve(x);
      out.max_abs_rho = std::max(
          out.max_abs_rho, std::abs(rho_stage(sol, x, oc.u_star, oc.mu)));
      stage_x[k] += x.squaredNorm();
      const StepResult s =
          step(model, x, oc.u_star, draw_noise(rng, k, model, config.noise));
      cost.add(weight * s.y.squaredNorm());
      energy[k + 1].add(cost.value());
      weight *= alpha;
      x = s.x_next;
    }
  }

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sol.L);
  out.c0 = eig.eigenvalues().maxCoeff();
  out.c1 = alpha * (sol.forms.varpi1 + out.max_abs_rho);
  // zeta = -1/2 (L + eps I)^{-1} (mu_bar . S(x0)).
  const Matrix Lt = sol.L + 1e-8 * Matrix::Identity(n, n);
  Vector mu_bar = Vector::Zero(n);
  if (alpha * sol.acl_radius < 1.0) mu_bar = mu_bound(sol);
  out.zeta = -0.5 * Lt.ldlt().solve(
                        mu_bar.cwiseProduct(sign_vector(x0).cast<double>()));
  const double offset = out.c0 * (x0 - out.zeta).squaredNorm();

  out.bound_holds = true;
  for (int k = 0; k <= K; ++k) {
    const double b = offset + k * out.c1 * std::pow(alpha, k);
    out.kappa.push_back(k);
    out.energy.push_back(energy[k].mean);
    out.energy_std_error.push_back(energy[k].std_error());
    out.bound.push_back(b);
    if (!(energy[k].mean <= b + 3.0 * energy[k].std_error())) {
      out.bound_holds = false;
    }
  }

  double head = 0.0, all = 0.0;
  const int three = 3 * K / 4;
  for (int k = 0; k < K; ++k) {
    all += stage_x[k];
    if (k < three) head += stage_x[k];
  }
  const double c_all = all / K, c_head = head / std::max(1, three);
  out.state_cesaro_drift =
      c_all == 0.0 ? 0.0 : std::abs(c_all - c_head) / std::abs(c_all);
  return out;
}

}  // namespace csviu
