#include <gtest/gtest.h>

#include "csviu/errors.h"
#include "csviu/operators.h"
#include "support.h"

namespace csviu {
namespace {

using testing::Rng;

Vector vec(const Matrix& M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

TEST(NoiseForms, ScalarValues) {
  const OperatorSet ops(testing::reference_scalar(), 0.9);
  const Matrix U = Matrix::Constant(1, 1, 2.0);
  const NoiseForms f = ops.noise_quadratic_forms(U);
  EXPECT_NEAR(f.Zx(0, 0), 0.18, 1e-15);
  EXPECT_NEAR(f.Wx(0, 0), 0.24, 1e-15);
  EXPECT_NEAR(f.Zu(0, 0), 0.32, 1e-15);
  EXPECT_NEAR(f.Wu(0, 0), 0.32, 1e-15);
  EXPECT_NEAR(f.varpi1, 0.18, 1e-15);
  EXPECT_NEAR(ops.lyapunov_step(U)(0, 0), 0.612, 1e-15);
  const SigmaLambda sl = ops.sigma_lambda(U);
  EXPECT_NEAR(sl.Sigma(0, 0), 1.0 + 1.0 / 0.9, 1e-15);
  EXPECT_NEAR(sl.Lambda(0, 0), 2.32 + 1.0 / 0.9, 1e-14);
  const double sig = 1.0 + 1.0 / 0.9, lam = 2.32 + 1.0 / 0.9;
  EXPECT_NEAR(ops.riccati_step(U)(0, 0), 0.612 - 0.9 * sig * sig / lam + 1.0,
              1e-14);
  EXPECT_NEAR(ops.riccati_step(U)(0, 0), 0.4429, 1e-4);
  EXPECT_NEAR(ops.operator_matrix(OperatorKind::l_alpha)(0, 0), 0.306, 1e-15);
}

TEST(NoiseForms, ZeroAndNoiselessCases) {
  Rng rng(9);
  const SystemModel md = testing::random_model(rng, 3, 2, 0.8, 0.3, 0.3);
  const OperatorSet ops(md, 0.9);
  const NoiseForms zero = ops.noise_quadratic_forms(Matrix::Zero(3, 3));
  EXPECT_EQ(zero.Zx.cwiseAbs().maxCoeff() + zero.Wu.cwiseAbs().maxCoeff() +
                std::abs(zero.varpi1),
            0.0);
  SystemModel smooth = md;
  smooth.sigma_bar_x.setZero();
  smooth.sigma_bar_u.setZero();
  const NoiseForms f =
      OperatorSet(smooth, 0.9).noise_quadratic_forms(testing::random_psd(rng, 3));
  EXPECT_EQ(f.Zx.cwiseAbs().maxCoeff() + f.Wx.cwiseAbs().maxCoeff() +
                f.Zu.cwiseAbs().maxCoeff() + f.Wu.cwiseAbs().maxCoeff(),
            0.0);
}

TEST(SigmaLambda, ZeroArgumentKeepsOutputTerms) {
  const OperatorSet ops(testing::scalar_model(), 0.9);
  const SigmaLambda sl = ops.sigma_lambda(Matrix::Zero(1, 1));
  EXPECT_EQ(sl.Sigma(0, 0), 0.0);  // D'C = 0
  EXPECT_NEAR(sl.Lambda(0, 0), 1.0 / 0.9, 1e-15);
}

TEST(Operators, LinearAndMonotone) {
  Rng rng(10);
  const SystemModel md = testing::random_model(rng, 3, 2, 0.9, 0.4, 0.4);
  const OperatorSet ops(md, 0.95);
  for (int i = 0; i < 20; ++i) {
    const Matrix U = testing::random_psd(rng, 3), V = testing::random_psd(rng, 3);
    const double a = testing::uniform(rng, -2, 2), b = testing::uniform(rng, -2, 2);
    const NoiseForms fu = ops.noise_quadratic_forms(U);
    const NoiseForms fv = ops.noise_quadratic_forms(V);
    const NoiseForms fc = ops.noise_quadratic_forms(a * U + b * V);
    EXPECT_LE((fc.Zx - a * fu.Zx - b * fv.Zx).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((fc.Wx - a * fu.Wx - b * fv.Wx).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((fc.Zu - a * fu.Zu - b * fv.Zu).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((fc.Wu - a * fu.Wu - b * fv.Wu).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(fc.varpi1, a * fu.varpi1 + b * fv.varpi1, 1e-12);
    EXPECT_LE((ops.lyapunov_step(a * U + b * V) - a * ops.lyapunov_step(U) -
               b * ops.lyapunov_step(V))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    // U + V >= U.
    const Matrix d = ops.lyapunov_step(U + V) - ops.lyapunov_step(U);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(d).eigenvalues().minCoeff(),
              -1e-10);
    const Matrix dz = ops.noise_quadratic_forms(U + V).Zx - fu.Zx;
    EXPECT_GE(dz.diagonal().minCoeff(), -1e-10);
    const Matrix lam = ops.sigma_lambda(U).Lambda;
    const double floor = Eigen::SelfAdjointEigenSolver<Matrix>(
                             md.D.transpose() * md.D / 0.95)
                             .eigenvalues()
                             .minCoeff();
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(lam).eigenvalues().minCoeff(),
              floor - 1e-10);
  }
}

TEST(NoiseForms, ConditionalSecondMomentIdentity) {
  // E|noise|^2_U = |x|^2_Zx + <S(x), Wx x> + |u|^2_Zu + <S(u), Wu u> + varpi1.
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemModel md = testing::random_model(rng, 3, 2, 0.8, 0.4, 0.4);
    const OperatorSet ops(md, 0.9);
    const Matrix U = testing::random_psd(rng, 3);
    const Vector x = testing::random_vector(rng, 3);
    const Vector u = testing::random_vector(rng, 2);
    const Matrix sx = md.sigma_x + md.sigma_bar_x * x.cwiseAbs().asDiagonal();
    const Matrix su = md.sigma_u + md.sigma_bar_u * u.cwiseAbs().asDiagonal();
    const Matrix cov = md.sigma * md.sigma.transpose() + sx * sx.transpose() +
                       su * su.transpose();
    const double exact = (U * cov).trace();
    const NoiseForms f = ops.noise_quadratic_forms(U);
    const Vector sgx = sign_vector(x).cast<double>();
    const Vector sgu = sign_vector(u).cast<double>();
    const double formula = x.dot(f.Zx * x) + sgx.dot(f.Wx * x) +
                           u.dot(f.Zu * u) + sgu.dot(f.Wu * u) + f.varpi1;
    EXPECT_NEAR(formula, exact, 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST(Vectorization, CongruenceMatchesDirect) {
  Rng rng(2);
  for (auto [rows, cols] : {std::pair{3, 3}, std::pair{2, 4}, std::pair{4, 2}}) {
    const Matrix M = testing::random_matrix(rng, rows, cols);
    const Matrix U = testing::random_matrix(rng, rows, rows);
    const Matrix K = congruence_matrix(M);
    EXPECT_LE((K * vec(U) - vec(M.transpose() * U * M)).cwiseAbs().maxCoeff(),
              1e-12);
    const Matrix S = testing::random_matrix(rng, rows, cols);
    const Matrix D = diag_congruence_matrix(S);
    const Matrix direct = Matrix((S.transpose() * U * S).diagonal().asDiagonal());
    EXPECT_LE((D * vec(U) - vec(direct)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Vectorization, OperatorMatricesMatchEvaluation) {
  Rng rng(3);
  const SystemModel md = testing::random_model(rng, 3, 2, 0.9, 0.3, 0.3);
  const OperatorSet ops(md, 0.95);
  const Matrix U = testing::random_psd(rng, 3);
  const Vector direct = vec(ops.lyapunov_step(U));
  EXPECT_LE((ops.operator_matrix(OperatorKind::l_alpha) * vec(U) - direct)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_LE((ops.operator_matrix(OperatorKind::a_only) * vec(U) -
             vec(md.A.transpose() * U * md.A))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  const NoiseForms f = ops.noise_quadratic_forms(U);
  EXPECT_LE((ops.operator_matrix(OperatorKind::zx_only) * vec(U) - vec(f.Zx))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  const Matrix G = testing::random_matrix(rng, 2, 3, 0.3);
  const Matrix Acl = md.A + md.B * G;
  const Matrix closed = 0.95 * (Acl.transpose() * U * Acl + f.Zx +
                                G.transpose() * f.Zu * G);
  EXPECT_LE((ops.closed_loop_matrix(G) * vec(U) - vec(closed)).cwiseAbs().maxCoeff(),
            1e-12);
  const Matrix H = testing::random_matrix(rng, 3, md.p(), 0.2);
  const Matrix Ah = md.A + H * md.C;
  EXPECT_LE((ops.output_injection_matrix(H) * vec(U) -
             vec(0.95 * (Ah.transpose() * U * Ah + f.Zx)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(RiccatiStep, ClassicalFormWithoutStateControlNoise) {
  Rng rng(4);
  SystemModel md = testing::random_model(rng, 3, 2, 1.0, 0.0, 0.0);
  const double alpha = 0.9;
  const OperatorSet ops(md, alpha);
  const Matrix U = testing::random_psd(rng, 3);
  const Matrix Q = md.C.transpose() * md.C, R = md.D.transpose() * md.D;
  const Matrix BtUB = md.B.transpose() * U * md.B;
  const Matrix classical =
      Q + alpha * md.A.transpose() * U * md.A -
      alpha * alpha * md.A.transpose() * U * md.B *
          (R + alpha * BtUB).ldlt().solve(md.B.transpose() * U * md.A);
  EXPECT_LE((ops.riccati_step(U) - classical).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(RiccatiStep, SingularLambdaThrows) {
  SystemModel md = SystemModel::deterministic(
      Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2),
      Matrix::Zero(2, 2));
  const OperatorSet ops(md, 0.9);
  EXPECT_THROW(ops.riccati_step(Matrix::Zero(2, 2)), SingularLambda);
}

TEST(Symmetrize, AveragesTranspose) {
  const Matrix M = (Matrix(2, 2) << 1.0, 2.0, 4.0, 3.0).finished();
  const Matrix S = symmetrize(M);
  EXPECT_DOUBLE_EQ(S(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(S(1, 0), 3.0);
}

TEST(SpectralRadius, MethodsAgree) {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Matrix M = testing::random_psd(rng, 6);  // real dominant eigenvalue
    const double e = spectral_radius(M, SpectralMethod::eigen);
    const double p = spectral_radius(M, SpectralMethod::power);
    EXPECT_NEAR(e, p, 1e-8 * e);
  }
  const Matrix rot = (Matrix(2, 2) << 0.0, -1.0, 1.0, 0.0).finished();
  EXPECT_NEAR(spectral_radius(rot), 1.0, 1e-14);
  const Matrix companion = (Matrix(2, 2) << 1.0, 1.0, 1.0, 0.0).finished();
  EXPECT_NEAR(spectral_radius(companion), (1.0 + std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_NEAR(spectral_radius(companion, SpectralMethod::power),
              (1.0 + std::sqrt(5.0)) / 2.0, 1e-10);
  EXPECT_DOUBLE_EQ(spectral_radius(Matrix::Constant(1, 1, 0.306)), 0.306);
}

}  // namespace
}  // namespace csviu
