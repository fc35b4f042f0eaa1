#include "csviu/riccati.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "csviu/errors.h"

namespace csviu {
namespace {

void require_dtd_positive(const SystemModel& model) {
  const Matrix DtD = model.D.transpose() * model.D;
  Eigen::SelfAdjointEigenSolver<Matrix> es(DtD, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))) {
    throw ValidationError(
        "D'D must be positive definite for the optimal control problem "
        "(smallest eigenvalue " + std::to_string(lo) + ")");
  }
}

double sup_norm(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

Matrix feedback_gain(const OperatorSet& ops, const Matrix& U) {
  const SigmaLambda sl = ops.sigma_lambda(U);
  Eigen::LDLT<Matrix> ldlt(sl.Lambda);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularLambda("feedback_gain");
  }
  return -ldlt.solve(sl.Sigma);
}

RiccatiSolution solve_riccati(const SystemModel& model, double alpha,
                              const RiccatiOptions& options) {
  require_dtd_positive(model);
  const OperatorSet ops(model, alpha);
  const auto n = model.n();

  Matrix P = Matrix::Zero(n, n);
  double first_norm = 0.0;
  int it = 0;
  double change = std::numeric_limits<double>::infinity();
  for (; it < options.max_iters; ++it) {
    const Matrix next = ops.riccati_step(P);
    const Matrix diff = next - P;
    change = sup_norm(diff);
    if (it == 0) first_norm = sup_norm(next);
    if (change > options.tol) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -options.monotone_tol) {
        std::ostringstream msg;
        msg << "solve_riccati: iterate " << it + 1
            << " decreased in PSD order (min eigenvalue of difference "
            << es.eigenvalues().minCoeff() << ")";
        throw MonotonicityViolation(msg.str());
      }
    }
    P = next;
    if (!P.allFinite() ||
        sup_norm(P) > options.divergence_factor * std::max(1.0, first_norm)) {
      std::ostringstream msg;
      msg << "solve_riccati: no PSD solution detected; iterate norm grew to "
          << sup_norm(P) << " after " << it + 1 << " steps (last change "
          << change << ")";
      throw NoPsdSolution(msg.str());
    }
    if (change <= options.tol) {
      ++it;
      break;
    }
  }
  if (change > options.tol) {
    throw MaxIterations("solve_riccati", options.max_iters, change);
  }

  RiccatiSolution sol = complete_solution(model, alpha, P);
  sol.iterations = it;
  return sol;
}

RiccatiSolution complete_solution(const SystemModel& model, double alpha,
                                  const Matrix& L) {
  const OperatorSet ops(model, alpha);
  RiccatiSolution sol;
  sol.model = model;
  sol.alpha = alpha;
  sol.L = symmetrize(L);
  const SigmaLambda sl = ops.sigma_lambda(sol.L);
  sol.Sigma = sl.Sigma;
  sol.Lambda = sl.Lambda;
  sol.forms = ops.noise_quadratic_forms(sol.L);
  sol.G = feedback_gain(ops, sol.L);
  sol.Acl = model.A + model.B * sol.G;
  sol.residual = sup_norm(ops.riccati_step(sol.L) - sol.L);
  sol.acl_radius = spectral_radius(sol.Acl);
  sol.alpha_condition_ok = alpha <= 1.0 || sol.acl_radius < 1.0 / alpha;
  return sol;
}

std::vector<Matrix> finite_horizon_riccati(const SystemModel& model,
                                           double alpha, int kappa) {
  if (kappa < 0) throw ValidationError("finite_horizon_riccati: kappa < 0");
  require_dtd_positive(model);
  const OperatorSet ops(model, alpha);
  std::vector<Matrix> P(static_cast<std::size_t>(kappa) + 1);
  P[kappa] = Matrix::Zero(model.n(), model.n());
  for (int k = kappa - 1; k >= 0; --k) P[k] = ops.riccati_step(P[k + 1]);
  return P;
}

}  // namespace csviu
