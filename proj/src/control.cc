#include "csviu/control.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csviu/errors.h"

namespace csviu {
namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

ControlSubproblem ControlSubproblem::from_quadratic(const Matrix& quad,
                                                    const Vector& b,
                                                    const Vector& c) {
  if (quad.rows() != quad.cols() || quad.rows() != b.size() ||
      c.size() != b.size()) {
    throw ValidationError("ControlSubproblem: inconsistent dimensions");
  }
  if ((c.array() < 0.0).any()) {
    throw AssumptionViolated("ControlSubproblem: l1 weights must be nonnegative");
  }
  const Matrix sym = 0.5 * (quad + quad.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw SingularLambda("ControlSubproblem");
  }
  ControlSubproblem sub;
  sub.W_inverse = 2.0 * sym;
  sub.W = 0.5 * llt.solve(Matrix::Identity(sym.rows(), sym.cols()));
  sub.W = 0.5 * (sub.W + sub.W.transpose());
  sub.b = b;
  sub.c = c;
  return sub;
}

ControlSubproblem build_subproblem(const RiccatiSolution& sol, const Vector& x,
                                   const Vector& mu) {
  const SystemModel& md = sol.model;
  if (x.size() != md.n() || mu.size() != md.n()) {
    throw ValidationError("build_subproblem: x and mu must have n entries");
  }
  if (!mu.allFinite()) throw ValidationError("build_subproblem: mu not finite");
  const Vector Wud = sol.forms.Wu_d();
  if ((Wud.array() < -1e-12).any()) {
    throw AssumptionViolated(
        "W_u(L) has a negative diagonal entry; the l1 weight must be "
        "nonnegative");
  }
  const double a = sol.alpha;
  ControlSubproblem sub = ControlSubproblem::from_quadratic(
      a * sol.Lambda, a * (md.B.transpose() * mu + 2.0 * sol.Sigma * x),
      a * Wud.cwiseMax(0.0));
  sub.x = x;
  sub.mu = mu;
  return sub;
}

double cost_Ju(const ControlSubproblem& sub, const Vector& u) {
  return 0.5 * u.dot(sub.W_inverse * u) + sub.b.dot(u) +
         sub.c.dot(u.cwiseAbs());
}

const char* to_string(SorMemory memory) {
  return memory == SorMemory::state ? "state" : "multiplier";
}

SorState sor_solve(const ControlSubproblem& sub, double omega, const Vector& z0,
                   double tol, int max_iters, SorMemory memory) {
  if (!(omega > 0.0 && omega < 2.0)) {
    throw ValidationError("sor_solve: omega must lie in (0, 2)");
  }
  const int m = sub.m();
  if (z0.size() != m) throw ValidationError("sor_solve: z0 has wrong size");
  const Matrix& W = sub.W;
  const Vector& b = sub.b;
  const Vector& c = sub.c;
  for (int i = 0; i < m; ++i) {
    if (!(W(i, i) > 0.0)) {
      throw SolverError("sor_solve: W has a non-positive diagonal entry");
    }
  }

  SorState st;
  st.z = z0;
  st.gamma.resize(m);
  for (int i = 0; i < m; ++i) {
    st.gamma[i] = std::min(c[i], std::abs(st.z[i])) * sgn(st.z[i]);
  }
  st.nu.resize(m);
  st.theta.resize(m);

  auto finish_sweep = [&]() {
    for (int i = 0; i < m; ++i) {
      const double excess = std::max(0.0, W(i, i) * (std::abs(st.z[i]) - c[i]));
      st.nu[i] = excess * sgn(st.z[i]);
      st.theta[i] = c[i] > 0.0 ? std::abs(st.nu[i]) / c[i] : 0.0;
    }
    st.residual = (st.nu + W * (st.gamma + b)).cwiseAbs().maxCoeff();
  };

  finish_sweep();
  for (st.iterations = 0; st.iterations < max_iters; ++st.iterations) {
    if (st.residual <= tol && st.iterations > 0) break;
    for (int i = 0; i < m; ++i) {
      double coupling = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j != i) coupling += W(i, j) * (st.gamma[j] + b[j]);
      }
      if (memory == SorMemory::state) {
        st.z[i] = (1.0 - omega) * st.z[i] - omega / W(i, i) * coupling -
                  omega * b[i];
        st.gamma[i] = std::min(c[i], std::abs(st.z[i])) * sgn(st.z[i]);
      } else {
        st.z[i] = -coupling / W(i, i) - b[i];
        const double g = (1.0 - omega) * st.gamma[i] + omega * st.z[i];
        st.gamma[i] = std::clamp(g, -c[i], c[i]);
      }
    }
    finish_sweep();
  }
  if (st.residual > tol) {
    throw MaxIterations("sor_solve", st.iterations, st.residual);
  }
  return st;
}

ControlLaw::ControlLaw(RiccatiSolution sol, ControlOptions options)
    : sol_(std::make_shared<const RiccatiSolution>(std::move(sol))),
      options_(std::move(options)),
      lambda_(sol_->Lambda) {
  if (lambda_.info() != Eigen::Success || !lambda_.isPositive()) {
    throw SingularLambda("ControlLaw");
  }
  if (!(options_.omega > 0.0 && options_.omega < 2.0)) {
    throw ValidationError("ControlLaw: omega must lie in (0, 2)");
  }
}

OptimalControl ControlLaw::solve(const Vector& x, const Vector& mu) const {
  const RiccatiSolution& sol = *sol_;
  OptimalControl out;
  out.sub = build_subproblem(sol, x, mu);
  out.mu = mu;
  out.sor = sor_solve(out.sub, options_.omega, Vector::Zero(sol.model.m()),
                      options_.tol, options_.max_iters, options_.sor_memory);
  out.u_star = out.sor.nu;
  out.gamma_star = out.sor.gamma;

  // Closed-form reconstruction from the multiplier, in Lambda(L) units.
  const Vector rebuilt =
      -lambda_.solve(sol.Sigma * x +
                     0.5 * (sol.model.B.transpose() * mu +
                            out.gamma_star / sol.alpha));
  const double scale = std::max(1.0, out.u_star.cwiseAbs().maxCoeff());
  if ((rebuilt - out.u_star).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "optimal_control: multiplier reconstruction disagrees with the SOR "
           "iterate by "
        << (rebuilt - out.u_star).cwiseAbs().maxCoeff();
    throw SolverError(msg.str());
  }
  return out;
}

OptimalControl ControlLaw::solve(const Vector& x) const {
  const RiccatiSolution& sol = *sol_;
  const auto n = sol.model.n();
  switch (options_.mu_kind) {
    case MuKind::zero:
      return solve(x, Vector::Zero(n));
    case MuKind::asymptotic: {
      const SignVector s_x = sign_vector(x);
      SignVector s_u = sign_vector(sol.G * x);
      OptimalControl out =
          solve(x, mu_asymptotic(sol, s_x, s_u, options_.resolvent));
      for (int sweep = 1; sweep < options_.sign_sweeps; ++sweep) {
        const SignVector next = sign_vector(out.u_star);
        if (next == s_u) break;
        s_u = next;
        out = solve(x, mu_asymptotic(sol, s_x, s_u, options_.resolvent));
      }
      return out;
    }
    case MuKind::rollout: {
      RolloutOptions ro = options_.rollout;
      ro.first_stage = 1;
      const Matrix G = sol.G;
      const MuEstimate est = mu_rollout(
          sol, x, [G](const Vector& s) -> Vector { return G * s; }, ro);
      return solve(x, est.value);
    }
  }
  throw ValidationError("ControlLaw: unknown mu estimator");
}

OptimalControl optimal_control(const RiccatiSolution& sol, const Vector& x,
                               const ControlOptions& options) {
  return ControlLaw(sol, options).solve(x);
}

Vector rho_center(const RiccatiSolution& sol, const Vector& x, const Vector& u,
                  const Vector& mu) {
  const Vector beta = sol.model.B.transpose() * mu +
                      sol.forms.Wu * sign_vector(u).cast<double>();
  return -sol.Lambda.ldlt().solve(sol.Sigma * x + 0.5 * beta);
}

double rho_stage(const RiccatiSolution& sol, const Vector& x, const Vector& u,
                 const Vector& mu) {
  const auto ldlt = sol.Lambda.ldlt();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularLambda("rho_stage");
  }
  const Vector beta = sol.model.B.transpose() * mu +
                      sol.forms.Wu * sign_vector(u).cast<double>();
  const Vector u0 = -ldlt.solve(sol.Sigma * x + 0.5 * beta);
  const Vector d = u - u0;
  return sol.alpha * d.dot(sol.Lambda * d) -
         0.25 * sol.alpha * beta.dot(ldlt.solve(beta));
}

RhoMin rho_min(const ControlLaw& law, const Vector& x, const Vector& mu) {
  const RiccatiSolution& sol = law.solution();
  RhoMin out;
  out.u_star = law.solve(x, mu).u_star;
  out.u0 = rho_center(sol, x, out.u_star, mu);
  out.rho = rho_stage(sol, x, out.u_star, mu);
  return out;
}

InactionResult inaction_test(const RiccatiSolution& sol, const Vector& x,
                             const Vector& mu, int channel) {
  if (channel < 0 || channel >= sol.model.m()) {
    throw ValidationError("inaction_test: channel index out of range");
  }
  const double lhs = std::abs(2.0 * sol.Sigma.row(channel).dot(x) +
                              sol.model.B.col(channel).dot(mu));
  InactionResult out;
  out.margin = sol.forms.Wu_d()[channel] - lhs;
  out.inactive = out.margin > 0.0;
  return out;
}

double coupled_inaction_margin(const ControlSubproblem& sub, const Vector& u,
                               int channel, double alpha) {
  double field = sub.b[channel];
  for (int j = 0; j < sub.m(); ++j) {
    if (j != channel) field += sub.W_inverse(channel, j) * u[j];
  }
  return (sub.c[channel] - std::abs(field)) / alpha;
}

}  // namespace csviu
