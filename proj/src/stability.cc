#include "csviu/stability.h"

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "csviu/errors.h"

namespace csviu {
namespace {

constexpr double kMargin = 1e-10;

Verdict both(Verdict a, Verdict b) {
  if (a == Verdict::no || b == Verdict::no) return Verdict::no;
  if (a == Verdict::indeterminate || b == Verdict::indeterminate) {
    return Verdict::indeterminate;
  }
  return Verdict::yes;
}

Matrix unvec(const Vector& v, Eigen::Index n) {
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Vector vec(const Matrix& U) {
  return Eigen::Map<const Vector>(U.data(), U.size());
}

double min_eigenvalue(const Matrix& U) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (U + U.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

bool StabilityReport::conditions_agree() const {
  const std::array<Verdict, 5> verdicts = {inverse_positive, d_stable,
                                           lyapunov, relative_d_stable,
                                           eig_condition};
  bool any_yes = false;
  bool any_no = false;
  for (Verdict v : verdicts) {
    any_yes |= v == Verdict::yes;
    any_no |= v == Verdict::no;
  }
  return !(any_yes && any_no);
}

StabilityReport check_alpha_stability(const SystemModel& model, double alpha,
                                      std::uint64_t probe_seed) {
  const OperatorSet ops(model, alpha);
  const Eigen::Index n = model.n();
  const Eigen::Index d = n * n;
  StabilityReport rep;
  rep.alpha = alpha;

  const Matrix M = ops.operator_matrix(OperatorKind::l_alpha);
  rep.l_alpha_radius = spectral_radius(M);
  rep.d_stable = strictly_less(rep.l_alpha_radius, 1.0, kMargin);

  const Eigen::FullPivLU<Matrix> lu(Matrix::Identity(d, d) - M);
  if (!lu.isInvertible()) {
    rep.lyapunov = Verdict::indeterminate;
    rep.inverse_positive = Verdict::indeterminate;
    rep.d_stable = Verdict::no;
  } else {
    // (iii) with the witness U = (I - L)^{-1}(I).
    const Matrix U = unvec(lu.solve(vec(Matrix::Identity(n, n))), n);
    const Matrix Usym = 0.5 * (U + U.transpose());
    const double scale = std::max(1.0, Usym.cwiseAbs().maxCoeff());
    rep.witness_min_eigenvalue = min_eigenvalue(Usym);
    rep.residual_min_eigenvalue = min_eigenvalue(Usym - ops.lyapunov_step(Usym));
    rep.lyapunov = both(
        strictly_less(-rep.witness_min_eigenvalue / scale, 0.0, kMargin),
        strictly_less(-rep.residual_min_eigenvalue / scale, 0.0, kMargin));
    if (rep.lyapunov == Verdict::yes) rep.lyapunov_witness = Usym;

    // (i) sampled: the identity plus ten random positive definite probes.
    std::mt19937_64 gen(probe_seed);
    std::normal_distribution<double> normal;
    double worst = rep.witness_min_eigenvalue / scale;
    for (int probe = 0; probe < 10; ++probe) {
      Matrix R(n, n);
      for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = normal(gen);
      const Matrix Q = R * R.transpose() + 0.1 * Matrix::Identity(n, n);
      const Matrix V = unvec(lu.solve(vec(Q)), n);
      const double v_scale = std::max(1.0, V.cwiseAbs().maxCoeff());
      worst = std::min(worst, min_eigenvalue(V) / v_scale);
    }
    rep.inverse_min_eigenvalue = worst;
    rep.inverse_positive = strictly_less(-worst, 0.0, kMargin);
  }

  // (iv) assembled from sqrt(alpha) A and alpha Z_x separately.
  const Matrix relative =
      congruence_matrix(std::sqrt(alpha) * model.A) +
      alpha * ops.operator_matrix(OperatorKind::zx_only);
  rep.relative_radius = spectral_radius(relative);
  rep.relative_d_stable = strictly_less(rep.relative_radius, 1.0, kMargin);

  // (v)
  rep.sqrt_alpha_a_radius = spectral_radius(std::sqrt(alpha) * model.A);
  const Verdict sqrt_ok = strictly_less(rep.sqrt_alpha_a_radius, 1.0, kMargin);
  if (sqrt_ok == Verdict::no) {
    rep.resolvent_radius = std::numeric_limits<double>::infinity();
    rep.eig_condition = Verdict::no;
  } else {
    const Matrix AA = ops.operator_matrix(OperatorKind::a_only);
    const Eigen::FullPivLU<Matrix> res(Matrix::Identity(d, d) - alpha * AA);
    if (!res.isInvertible()) {
      rep.resolvent_radius = std::numeric_limits<double>::infinity();
      rep.eig_condition = both(sqrt_ok, Verdict::indeterminate);
    } else {
      const Matrix R = res.solve(ops.operator_matrix(OperatorKind::zx_only));
      rep.resolvent_radius = spectral_radius(R);
      rep.eig_condition = both(
          sqrt_ok, strictly_less(rep.resolvent_radius, 1.0 / alpha, kMargin));
    }
  }

  rep.overall = rep.d_stable;
  if (alpha >= 1.0) {
    rep.alpha_a_radius = alpha * spectral_radius(model.A);
    rep.alpha_a_in_disk = strictly_less(rep.alpha_a_radius, 1.0, kMargin);
    rep.overall = both(rep.overall, *rep.alpha_a_in_disk);
  }
  return rep;
}

DetectabilityResult check_detectability(const SystemModel& model, double alpha,
                                        const Matrix& H) {
  const OperatorSet ops(model, alpha);
  DetectabilityResult out;
  out.radius = spectral_radius(ops.output_injection_matrix(H));
  out.detectable = strictly_less(out.radius, 1.0, kMargin);
  return out;
}

std::optional<Matrix> detectability_search(const SystemModel& model,
                                           double alpha, int attempts,
                                           std::uint64_t seed) {
  if (attempts < 1) throw ValidationError("detectability_search: attempts < 1");
  const Matrix pinvC =
      Eigen::CompleteOrthogonalDecomposition<Matrix>(model.C).pseudoInverse();
  const Matrix H0 = -model.A * pinvC;
  auto passes = [&](const Matrix& H) {
    return check_detectability(model, alpha, H).detectable == Verdict::yes;
  };
  for (int step = 0; step <= 10; ++step) {
    const Matrix H = (1.0 - 0.1 * step) * H0;
    if (passes(H)) return H;
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  const double spread = std::max(1.0, H0.norm());
  for (int a = 0; a < attempts; ++a) {
    Matrix H = H0;
    for (Eigen::Index i = 0; i < H.size(); ++i) {
      H.data()[i] += spread * normal(gen) / (1.0 + a % 10);
    }
    if (passes(H)) return H;
  }
  return std::nullopt;
}

Matrix h_alpha_g_step(const OperatorSet& ops, const Matrix& U_in,
                      const Matrix& G) {
  const SystemModel& md = ops.model();
  const double alpha = ops.alpha();
  const Matrix U = symmetrize(U_in);
  const NoiseForms f = ops.noise_quadratic_forms(U);
  const Matrix Acl = md.A + md.B * G;
  const Matrix Ccl = md.C + md.D * G;
  return alpha * Acl.transpose() * U * Acl + alpha * f.Zx +
         alpha * G.transpose() * f.Zu * G + Ccl.transpose() * Ccl;
}

Matrix h_alpha_g_block(const OperatorSet& ops, const Matrix& U,
                       const Matrix& G) {
  const SystemModel& md = ops.model();
  const double alpha = ops.alpha();
  const auto n = md.n();
  const auto m = md.m();
  const SigmaLambda sl = ops.sigma_lambda(U);
  Matrix block(n + m, n + m);
  block.topLeftCorner(n, n) = md.C.transpose() * md.C / alpha;
  block.topRightCorner(n, m) = sl.Sigma.transpose();
  block.bottomLeftCorner(m, n) = sl.Sigma;
  block.bottomRightCorner(m, m) = sl.Lambda;
  Matrix IG(n + m, n);
  IG.topRows(n) = Matrix::Identity(n, n);
  IG.bottomRows(m) = G;
  return ops.lyapunov_step(U) + alpha * IG.transpose() * block * IG;
}

ClosedLoopCheck closed_loop_check(const SystemModel& model, double alpha,
                                  const Matrix& G) {
  const OperatorSet ops(model, alpha);
  ClosedLoopCheck out;
  out.operator_radius = spectral_radius(ops.closed_loop_matrix(G));
  out.acl_radius = spectral_radius(model.A + model.B * G);
  out.stabilizing = strictly_less(out.operator_radius, 1.0, kMargin);
  if (alpha > 1.0) {
    out.alpha_clause = strictly_less(out.acl_radius, 1.0 / alpha, kMargin);
    out.stabilizing = both(out.stabilizing, *out.alpha_clause);
  }
  return out;
}

}  // namespace csviu
