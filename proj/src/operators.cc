#include "csviu/operators.h"

#include <cmath>
#include <iostream>

#include <unsupported/Eigen/KroneckerProduct>

#include "csviu/errors.h"

namespace csviu {

Matrix symmetrize(const Matrix& U) {
  const double asym = (U - U.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, U.cwiseAbs().maxCoeff())) {
    std::clog << "csviu: symmetrizing input with asymmetry " << asym << "\n";
  }
  return 0.5 * (U + U.transpose());
}

Matrix congruence_matrix(const Matrix& M) {
  const Matrix Mt = M.transpose();
  return Eigen::kroneckerProduct(Mt, Mt).eval();
}

Matrix diag_congruence_matrix(const Matrix& S) {
  const auto k = S.rows();
  const auto c = S.cols();
  Matrix out = Matrix::Zero(c * c, k * k);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index b = 0; b < k; ++b) {
      for (Eigen::Index a = 0; a < k; ++a) {
        out(i + c * i, a + k * b) = S(a, i) * S(b, i);
      }
    }
  }
  return out;
}

OperatorSet::OperatorSet(SystemModel model, double alpha)
    : model_(std::move(model)), alpha_(alpha) {
  validate(model_);
  if (!(alpha_ > 0.0)) throw ValidationError("alpha must be positive");
}

NoiseForms OperatorSet::noise_quadratic_forms(const Matrix& U_in) const {
  const auto& md = model_;
  if (U_in.rows() != md.n() || U_in.cols() != md.n()) {
    throw ValidationError("noise_quadratic_forms: U must be n x n");
  }
  const Matrix U = symmetrize(U_in);
  NoiseForms f;
  const Matrix Usbx = U * md.sigma_bar_x;
  const Matrix Usbu = U * md.sigma_bar_u;
  f.Zx = (md.sigma_bar_x.transpose() * Usbx).diagonal().asDiagonal();
  const Matrix cross_x = md.sigma_bar_x.transpose() * U * md.sigma_x;
  f.Wx = (cross_x + cross_x.transpose()).diagonal().asDiagonal();
  f.Zu = (md.sigma_bar_u.transpose() * Usbu).diagonal().asDiagonal();
  const Matrix cross_u = md.sigma_bar_u.transpose() * U * md.sigma_u;
  f.Wu = (cross_u + cross_u.transpose()).diagonal().asDiagonal();
  const Matrix noise_cov = md.sigma * md.sigma.transpose() +
                           md.sigma_x * md.sigma_x.transpose() +
                           md.sigma_u * md.sigma_u.transpose();
  f.varpi1 = (U * noise_cov).trace();
  return f;
}

Matrix OperatorSet::lyapunov_step(const Matrix& U_in) const {
  const Matrix U = symmetrize(U_in);
  const Matrix Zx = (model_.sigma_bar_x.transpose() * U * model_.sigma_bar_x)
                        .diagonal()
                        .asDiagonal();
  return alpha_ * (model_.A.transpose() * U * model_.A + Zx);
}

SigmaLambda OperatorSet::sigma_lambda(const Matrix& U_in) const {
  const Matrix U = symmetrize(U_in);
  const auto& md = model_;
  SigmaLambda out;
  out.Sigma = md.B.transpose() * U * md.A +
              (md.D.transpose() * md.C) / alpha_;
  const Matrix Zu = (md.sigma_bar_u.transpose() * U * md.sigma_bar_u)
                        .diagonal()
                        .asDiagonal();
  out.Lambda = md.B.transpose() * U * md.B + Zu +
               (md.D.transpose() * md.D) / alpha_;
  out.Lambda = 0.5 * (out.Lambda + out.Lambda.transpose());
  return out;
}

Matrix OperatorSet::riccati_step(const Matrix& U) const {
  const SigmaLambda sl = sigma_lambda(U);
  Eigen::LDLT<Matrix> ldlt(sl.Lambda);
  const double scale = std::max(1.0, sl.Lambda.cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-14 * scale) {
    throw SingularLambda("riccati_step");
  }
  const Matrix gain = ldlt.solve(sl.Sigma);
  Matrix out = lyapunov_step(U) - alpha_ * sl.Sigma.transpose() * gain +
               model_.C.transpose() * model_.C;
  return 0.5 * (out + out.transpose());
}

Matrix OperatorSet::operator_matrix(OperatorKind kind) const {
  switch (kind) {
    case OperatorKind::a_only:
      return congruence_matrix(model_.A);
    case OperatorKind::zx_only:
      return diag_congruence_matrix(model_.sigma_bar_x);
    case OperatorKind::l_alpha:
      return alpha_ * (congruence_matrix(model_.A) +
                       diag_congruence_matrix(model_.sigma_bar_x));
  }
  return {};
}

Matrix OperatorSet::closed_loop_matrix(const Matrix& G) const {
  if (G.rows() != model_.m() || G.cols() != model_.n()) {
    throw ValidationError("closed_loop_matrix: G must be m x n");
  }
  const Matrix Acl = model_.A + model_.B * G;
  const Matrix zu_part =
      congruence_matrix(G) * diag_congruence_matrix(model_.sigma_bar_u);
  return alpha_ * (congruence_matrix(Acl) +
                   diag_congruence_matrix(model_.sigma_bar_x) + zu_part);
}

Matrix OperatorSet::output_injection_matrix(const Matrix& H) const {
  if (H.rows() != model_.n() || H.cols() != model_.p()) {
    throw ValidationError("output_injection_matrix: H must be n x p");
  }
  const Matrix Ah = model_.A + H * model_.C;
  return alpha_ * (congruence_matrix(Ah) +
                   diag_congruence_matrix(model_.sigma_bar_x));
}

double spectral_radius(const Matrix& M, SpectralMethod method, int max_iters,
                       double tol) {
  if (M.rows() != M.cols()) {
    throw ValidationError("spectral_radius: matrix must be square");
  }
  if (!M.allFinite()) {
    throw ValidationError("spectral_radius: non-finite entries");
  }
  const auto d = M.rows();
  if (d == 0) return 0.0;
  if (method == SpectralMethod::automatic) {
    method = d <= 400 ? SpectralMethod::eigen : SpectralMethod::power;
  }
  if (method == SpectralMethod::eigen) {
    Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
      throw SolverError("spectral_radius: eigen-decomposition failed");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  // Deterministic start with components along every coordinate.
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + 1e-3 * std::sin(1.0 + i);
  v.normalize();
  double estimate = 0.0;
  int settled = 0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = M * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    if (std::abs(norm - estimate) <= tol * std::max(1.0, norm)) {
      if (++settled >= 5) return norm;
    } else {
      settled = 0;
    }
    estimate = norm;
    v = w / norm;
  }
  throw MaxIterations("spectral_radius power iteration", max_iters, estimate);
}

}  // namespace csviu
