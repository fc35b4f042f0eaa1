#pragma once

#include "csviu/model.h"
#include "csviu/types.h"

namespace csviu {

/// Diagonal noise operators evaluated at one symmetric matrix U.
struct NoiseForms {
  Matrix Zx;   // Diag(sbx' U sbx), n x n
  Matrix Wx;   // Diag(sbx' U sx + sx' U sbx), n x n
  Matrix Zu;   // Diag(sbu' U sbu), m x m
  Matrix Wu;   // Diag(sbu' U su + su' U sbu), m x m
  double varpi1 = 0.0;  // tr{U (s s' + sx sx' + su su')}

  Vector Wx_d() const { return Wx.diagonal(); }
  Vector Wu_d() const { return Wu.diagonal(); }
};

struct SigmaLambda {
  Matrix Sigma;   // B'UA + D'C / alpha, m x n
  Matrix Lambda;  // B'UB + Z_u(U) + D'D / alpha, m x m
};

/// Linear maps acting on symmetric matrices, vectorized column-major so that
/// vec(Op(U)) = M vec(U).
enum class OperatorKind {
  l_alpha,  // U -> alpha (A'UA + Z_x(U))
  a_only,   // U -> A'UA
  zx_only,  // U -> Z_x(U)
};

/// The operator family attached to one model and one discount factor.
/// Holds a copy of the model; evaluation is const and reentrant.
class OperatorSet {
 public:
  OperatorSet(SystemModel model, double alpha);

  const SystemModel& model() const { return model_; }
  double alpha() const { return alpha_; }

  NoiseForms noise_quadratic_forms(const Matrix& U) const;
  /// alpha (A'UA + Z_x(U))
  Matrix lyapunov_step(const Matrix& U) const;
  SigmaLambda sigma_lambda(const Matrix& U) const;
  /// L^alpha(U) - alpha Sigma' Lambda^{-1} Sigma + C'C. Throws SingularLambda.
  Matrix riccati_step(const Matrix& U) const;

  Matrix operator_matrix(OperatorKind kind) const;
  /// Vectorization of U -> alpha ((A+BG)'U(A+BG) + Z_x(U) + G' Z_u(U) G).
  Matrix closed_loop_matrix(const Matrix& G) const;
  /// Vectorization of U -> alpha ((A+HC)'U(A+HC) + Z_x(U)).
  Matrix output_injection_matrix(const Matrix& H) const;

 private:
  SystemModel model_;
  double alpha_;
};

/// (U + U')/2; logs to std::clog when the asymmetry exceeds 1e-9.
Matrix symmetrize(const Matrix& U);

/// Vectorization of U -> M'UM for square or rectangular M (cols(M)^2 x rows(M)^2).
Matrix congruence_matrix(const Matrix& M);
/// Vectorization of U (rows(S) x rows(S)) -> Diag(S'US) (cols(S)^2 x rows(S)^2).
Matrix diag_congruence_matrix(const Matrix& S);

enum class SpectralMethod { automatic, eigen, power };

/// Largest eigenvalue modulus. `automatic` uses a dense eigen-decomposition
/// for dimension <= 400 and power iteration above. Power iteration throws
/// MaxIterations when the ratio estimate does not settle.
double spectral_radius(const Matrix& M,
                       SpectralMethod method = SpectralMethod::automatic,
                       int max_iters = 100000, double tol = 1e-13);

}  // namespace csviu
