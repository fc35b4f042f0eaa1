#include "csviu/mu.h"

#include <cmath>

#include "csviu/errors.h"

namespace csviu {
namespace {

Vector sign_terms(const RiccatiSolution& sol, const SignVector& s_x,
                  const SignVector& s_u) {
  return sol.forms.Wx * s_x.cast<double>() +
         sol.G.transpose() * (sol.forms.Wu * s_u.cast<double>());
}

void require_convergent(const RiccatiSolution& sol, const char* where) {
  if (!(sol.alpha * sol.acl_radius < 1.0)) {
    throw SeriesDivergent(std::string(where) +
                          ": alpha * r(A + BG) >= 1, the mu series diverges");
  }
}

}  // namespace

const char* to_string(MuKind kind) {
  switch (kind) {
    case MuKind::zero:
      return "zero";
    case MuKind::asymptotic:
      return "asymptotic";
    case MuKind::rollout:
      return "rollout";
  }
  return "unknown";
}

MuKind mu_kind_from_string(std::string_view name) {
  if (name == "zero") return MuKind::zero;
  if (name == "asymptotic") return MuKind::asymptotic;
  if (name == "rollout") return MuKind::rollout;
  throw ValidationError("unknown mu estimator '" + std::string(name) + "'");
}

Vector mu_bound(const RiccatiSolution& sol) {
  require_convergent(sol, "mu_bound");
  const auto n = sol.model.n();
  // sum_k alpha^k |(Acl')^k|_inf, the geometric factor of the series.
  const Matrix At = sol.Acl.transpose();
  Matrix power = Matrix::Identity(n, n);
  double factor = 0.0;
  double weight = 1.0;
  for (int k = 0; k < 10000000; ++k) {
    const double term = weight * power.cwiseAbs().rowwise().sum().maxCoeff();
    factor += term;
    if (term <= 1e-17 * factor && k > 0) break;
    if (term == 0.0) break;
    power = power * At;
    weight *= sol.alpha;
  }
  const Vector forcing = sol.forms.Wx_d().cwiseAbs() +
                         sol.G.cwiseAbs().transpose() * sol.forms.Wu_d().cwiseAbs();
  const double level = sol.alpha * factor * forcing.maxCoeff();
  return Vector::Constant(n, level);
}

Vector mu_asymptotic(const RiccatiSolution& sol, const SignVector& s_x,
                     const SignVector& s_u, MuResolvent resolvent) {
  const auto n = sol.model.n();
  if (s_x.size() != n || s_u.size() != sol.model.m()) {
    throw ValidationError("mu_asymptotic: sign vector dimension mismatch");
  }
  const Matrix I = Matrix::Identity(n, n);
  const Matrix M = resolvent == MuResolvent::series
                       ? Matrix(I - sol.alpha * sol.Acl.transpose())
                       : Matrix(I - sol.Acl);
  const Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) {
    throw SeriesDivergent("mu_asymptotic: resolvent is singular");
  }
  return sol.alpha * lu.solve(sign_terms(sol, s_x, s_u));
}

int default_truncation_depth(const RiccatiSolution& sol, double rel_tail) {
  const double rate = sol.alpha * sol.acl_radius;
  if (rate <= 0.0) return 1;
  if (rate >= 1.0) {
    throw SeriesDivergent("default_truncation_depth: alpha * r(A + BG) >= 1");
  }
  return std::max(1, static_cast<int>(std::ceil(std::log(rel_tail) / std::log(rate))));
}

MuEstimate mu_rollout(const RiccatiSolution& sol, const Vector& x0,
                      const PolicyFn& policy, const RolloutOptions& options) {
  require_convergent(sol, "mu_rollout");
  if (options.paths < 1) throw ValidationError("mu_rollout: paths < 1");
  const SystemModel& model = sol.model;
  const auto n = model.n();
  const int depth =
      options.depth >= 0 ? options.depth : default_truncation_depth(sol);
  const int first = options.first_stage;
  const int stages = first + depth + 1;
  const Matrix At = sol.Acl.transpose();

  MuEstimate est;
  est.kind = MuKind::rollout;
  est.paths = options.paths;
  est.depth = depth;
  est.bound = mu_bound(sol);

  Vector mean = Vector::Zero(n);
  Vector m2 = Vector::Zero(n);
  Matrix forcing(n, depth + 1);
  for (int path = 0; path < options.paths; ++path) {
    const CounterRng rng(options.seed, static_cast<std::uint64_t>(path));
    Vector x = x0;
    for (int t = 0; t < stages; ++t) {
      const Vector u = policy(x);
      if (t >= first) {
        forcing.col(t - first) = sign_terms(sol, sign_vector(x), sign_vector(u));
      }
      if (t + 1 < stages) {
        x = step(model, x, u, draw_noise(rng, t, model, options.noise)).x_next;
      }
    }
    // Horner from the tail: s = alpha (w_j + Acl' s).
    Vector s = Vector::Zero(n);
    for (int j = depth; j >= 0; --j) s = sol.alpha * (forcing.col(j) + At * s);
    // Welford update in fixed path order.
    const Vector delta = s - mean;
    mean += delta / static_cast<double>(path + 1);
    m2 += delta.cwiseProduct(s - mean);
  }
  est.value = mean;
  if (options.paths > 1) {
    est.std_error = (m2 / static_cast<double>(options.paths - 1)).cwiseSqrt() /
                    std::sqrt(static_cast<double>(options.paths));
  } else {
    est.std_error = Vector::Zero(n);
  }
  est.s_x = sign_vector(x0);
  est.s_u = sign_vector(policy(x0));
  return est;
}

}  // namespace csviu
