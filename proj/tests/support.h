#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csviu/model.h"

namespace csviu::testing {

using Rng = std::mt19937_64;

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = nd(rng);
  return M;
}

inline Vector random_vector(Rng& rng, int n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_pd(Rng& rng, int n, double shift = 0.5) {
  const Matrix R = random_matrix(rng, n, n);
  return R * R.transpose() / n + shift * Matrix::Identity(n, n);
}

inline Matrix random_psd(Rng& rng, int n) {
  const Matrix R = random_matrix(rng, n, n);
  return R * R.transpose() / n;
}

/// A rescaled to a given spectral radius.
inline Matrix with_radius(const Matrix& A, double radius) {
  const double r = A.eigenvalues().cwiseAbs().maxCoeff();
  return r > 0.0 ? Matrix(A * (radius / r)) : A;
}

/// Random CSVIU model with D'C = 0 and full-rank state weight.
inline SystemModel random_model(Rng& rng, int n, int m, double radius,
                                double sbar_x, double sbar_u) {
  SystemModel md;
  md.A = with_radius(random_matrix(rng, n, n), radius);
  md.B = random_matrix(rng, n, m);
  md.C = Matrix::Zero(n + m, n);
  md.C.topRows(n) = random_pd(rng, n, 0.3);
  md.D = Matrix::Zero(n + m, m);
  md.D.bottomRows(m) = random_pd(rng, m, 0.5);
  md.sigma = random_matrix(rng, n, n, 0.1);
  md.sigma_x = random_matrix(rng, n, n, 0.1);
  md.sigma_bar_x = random_matrix(rng, n, n, sbar_x);
  md.sigma_u = random_matrix(rng, n, m, 0.1);
  md.sigma_bar_u = random_matrix(rng, n, m, sbar_u);
  return md;
}

/// Classical discounted DARE through the structure-preserving doubling
/// algorithm on the scaled pair (sqrt(alpha) A, sqrt(alpha) B):
///   P = Q + a A'PA - a^2 A'PB (R + a B'PB)^{-1} B'PA.
inline Matrix dare_doubling(const Matrix& A, const Matrix& B, const Matrix& Q,
                            const Matrix& R, double alpha) {
  const int n = static_cast<int>(A.rows());
  const double s = std::sqrt(alpha);
  Matrix Ak = s * A;
  Matrix Gk = alpha * B * R.ldlt().solve(B.transpose());
  Matrix Hk = Q;
  const Matrix I = Matrix::Identity(n, n);
  for (int it = 0; it < 200; ++it) {
    const Eigen::PartialPivLU<Matrix> lu(I + Gk * Hk);
    const Matrix AW = Ak * lu.inverse();
    const Matrix A_next = AW * Ak;
    const Matrix G_next = Gk + AW * Gk * Ak.transpose();
    const Matrix H_next = Hk + Ak.transpose() * Hk * lu.solve(Ak);
    const double change = (H_next - Hk).cwiseAbs().maxCoeff();
    Ak = A_next;
    Gk = 0.5 * (G_next + G_next.transpose());
    Hk = 0.5 * (H_next + H_next.transpose());
    if (change <= 1e-15 * std::max(1.0, Hk.cwiseAbs().maxCoeff())) break;
  }
  return Hk;
}

/// Iterative shrinkage on 1/2 u'Qu + b'u + <c, |u|>.
inline Vector ista(const Matrix& Q, const Vector& b, const Vector& c,
                   int max_iters = 2000000, double tol = 1e-15) {
  const double L = Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().maxCoeff();
  const double t = 1.0 / L;
  Vector u = Vector::Zero(b.size());
  for (int it = 0; it < max_iters; ++it) {
    const Vector v = u - t * (Q * u + b);
    Vector next(u.size());
    for (int i = 0; i < u.size(); ++i) {
      const double mag = std::abs(v[i]) - t * c[i];
      next[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = next;
    if (change <= tol) break;
  }
  return u;
}

/// Solution of X = M X M' + S via the Kronecker system.
inline Matrix discrete_lyapunov(const Matrix& M, const Matrix& S) {
  const int n = static_cast<int>(M.rows());
  Matrix K = Matrix::Identity(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          K(i + j * n, k + l * n) -= M(i, k) * M(j, l);
  const Eigen::Map<const Vector> s(S.data(), n * n);
  const Vector x = K.partialPivLu().solve(Vector(s));
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

/// Models exercised by the regression suite.
struct NamedModel {
  std::string name;
  SystemModel model;
  double alpha;
};

inline SystemModel scalar_model() {
  SystemModel md;
  md.A = Matrix::Constant(1, 1, 1.1);
  md.B = Matrix::Constant(1, 1, 1.0);
  md.C = (Matrix(2, 1) << 1.0, 0.0).finished();
  md.D = (Matrix(2, 1) << 0.0, 1.0).finished();
  md.sigma = Matrix::Constant(1, 1, 0.1);
  md.sigma_x = Matrix::Constant(1, 1, 0.2);
  md.sigma_bar_x = Matrix::Constant(1, 1, 0.3);
  md.sigma_u = Matrix::Constant(1, 1, 0.2);
  md.sigma_bar_u = Matrix::Constant(1, 1, 0.3);
  return md;
}

/// Reference scalar model: A = 0.5, B = C = D = 1.
inline SystemModel reference_scalar() {
  SystemModel md;
  md.A = Matrix::Constant(1, 1, 0.5);
  md.B = Matrix::Constant(1, 1, 1.0);
  md.C = Matrix::Constant(1, 1, 1.0);
  md.D = Matrix::Constant(1, 1, 1.0);
  md.sigma = Matrix::Constant(1, 1, 0.1);
  md.sigma_x = Matrix::Constant(1, 1, 0.2);
  md.sigma_bar_x = Matrix::Constant(1, 1, 0.3);
  md.sigma_u = Matrix::Constant(1, 1, 0.2);
  md.sigma_bar_u = Matrix::Constant(1, 1, 0.4);
  return md;
}

inline SystemModel two_state_model() {
  SystemModel md;
  md.A = (Matrix(2, 2) << 0.9, 0.3, -0.2, 1.05).finished();
  md.B = (Matrix(2, 2) << 0.0, 1.0, 1.0, 0.3).finished();
  md.C = Matrix::Zero(4, 2);
  md.C.topRows(2) = Matrix::Identity(2, 2);
  md.D = Matrix::Zero(4, 2);
  md.D.bottomRows(2) = Matrix::Identity(2, 2);
  md.sigma = 0.1 * Matrix::Identity(2, 2);
  md.sigma_x = 0.1 * Matrix::Identity(2, 2);
  md.sigma_bar_x = 0.2 * Matrix::Identity(2, 2);
  md.sigma_u = 0.2 * Matrix::Identity(2, 2);
  md.sigma_bar_u = 0.3 * Matrix::Identity(2, 2);
  return md;
}

/// Two states, one input.
inline SystemModel two_state_single_input() {
  SystemModel md;
  md.A = (Matrix(2, 2) << 1.0, 0.2, 0.0, 0.8).finished();
  md.B = (Matrix(2, 1) << 0.3, 1.0).finished();
  md.C = Matrix::Zero(3, 2);
  md.C.topRows(2) = Matrix::Identity(2, 2);
  md.D = Matrix::Zero(3, 1);
  md.D(2, 0) = 1.0;
  md.sigma = 0.1 * Matrix::Identity(2, 2);
  md.sigma_x = 0.05 * Matrix::Identity(2, 2);
  md.sigma_bar_x = 0.1 * Matrix::Identity(2, 2);
  md.sigma_u = (Matrix(2, 1) << 0.2, 0.4).finished();
  md.sigma_bar_u = (Matrix(2, 1) << 0.3, 0.5).finished();
  return md;
}

/// Output with a control cross term (D'C != 0).
inline SystemModel cross_term_model() {
  SystemModel md;
  md.A = (Matrix(3, 3) << 0.8, 0.4, 0.0, 0.0, 0.9, 0.3, 0.1, 0.0, 1.1).finished();
  md.B = (Matrix(3, 2) << 1.0, 0.0, 0.0, 0.5, 0.4, 1.0).finished();
  md.C = (Matrix(3, 3) << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.2, 0.0, 1.0).finished();
  md.D = (Matrix(3, 2) << 0.5, 0.0, 0.0, 1.0, 0.3, 0.2).finished();
  md.sigma = 0.05 * Matrix::Identity(3, 3);
  md.sigma_x = 0.05 * Matrix::Identity(3, 3);
  md.sigma_bar_x = 0.15 * Matrix::Identity(3, 3);
  md.sigma_u = Matrix::Constant(3, 2, 0.1);
  md.sigma_bar_u = Matrix::Constant(3, 2, 0.2);
  return md;
}

inline std::vector<NamedModel> regression_suite() {
  return {
      {"scalar", scalar_model(), 0.9},
      {"scalar_undiscounted", scalar_model(), 1.0},
      {"two_state", two_state_model(), 0.9},
      {"two_state_undiscounted", two_state_model(), 1.0},
      {"two_state_single_input", two_state_single_input(), 0.95},
      {"cross_term", cross_term_model(), 0.9},
      {"cross_term_counter_discounted", cross_term_model(), 1.02},
  };
}

}  // namespace csviu::testing
