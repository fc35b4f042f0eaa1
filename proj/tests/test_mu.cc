#include <gtest/gtest.h>

#include <cmath>

#include "csviu/errors.h"
#include "csviu/mu.h"
#include "support.h"

namespace csviu {
namespace {

using testing::Rng;

// Scalar solution with prescribed closed loop and noise operator values.
RiccatiSolution scalar_solution(double alpha, double acl, double g, double wx,
                                double wu) {
  RiccatiSolution sol;
  sol.model = SystemModel::deterministic(
      Matrix::Constant(1, 1, acl - g), Matrix::Constant(1, 1, 1.0),
      Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0));
  sol.alpha = alpha;
  sol.L = Matrix::Constant(1, 1, 1.0);
  sol.G = Matrix::Constant(1, 1, g);
  sol.Acl = Matrix::Constant(1, 1, acl);
  sol.acl_radius = std::abs(acl);
  sol.forms.Zx = Matrix::Zero(1, 1);
  sol.forms.Zu = Matrix::Zero(1, 1);
  sol.forms.Wx = Matrix::Constant(1, 1, wx);
  sol.forms.Wu = Matrix::Constant(1, 1, wu);
  return sol;
}

SignVector signs(std::initializer_list<int> s) {
  SignVector v(static_cast<Eigen::Index>(s.size()));
  Eigen::Index i = 0;
  for (int e : s) v[i++] = e;
  return v;
}

PolicyFn linear(const Matrix& G) {
  return [G](const Vector& x) -> Vector { return G * x; };
}

TEST(MuBound, ScalarGeometricSeries) {
  const RiccatiSolution sol = scalar_solution(1.0, 0.5, -0.4, 0.24, 0.1);
  EXPECT_NEAR(mu_bound(sol)[0], 0.56, 1e-14);
}

TEST(MuBound, NoMultiplicativeNoise) {
  SystemModel md = testing::two_state_model();
  md.sigma_bar_x.setZero();
  md.sigma_bar_u.setZero();
  const RiccatiSolution sol = solve_riccati(md, 0.9);
  EXPECT_EQ(mu_bound(sol).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(mu_asymptotic(sol, signs({1, -1}), signs({1, 1})).cwiseAbs().maxCoeff(),
            0.0);
}

TEST(MuBound, DivergentSeries) {
  const RiccatiSolution sol = scalar_solution(2.0, 0.6, -0.4, 0.24, 0.1);
  EXPECT_THROW(mu_bound(sol), SeriesDivergent);
  EXPECT_THROW(default_truncation_depth(sol), SeriesDivergent);
  EXPECT_THROW(mu_rollout(sol, Vector::Ones(1), linear(sol.G), {}), SeriesDivergent);
}

TEST(MuAsymptotic, ScalarValue) {
  // G' W_u = -0.04 with G = -0.4, W_u = 0.1.
  const RiccatiSolution sol = scalar_solution(0.9, 0.5, -0.4, 0.24, 0.1);
  const Vector mu = mu_asymptotic(sol, signs({1}), signs({1}));
  EXPECT_NEAR(mu[0], 0.9 / (1.0 - 0.45) * 0.20, 1e-15);
  EXPECT_NEAR(mu[0], 0.3273, 1e-4);
  const Vector undiscounted =
      mu_asymptotic(sol, signs({1}), signs({1}), MuResolvent::undiscounted);
  EXPECT_NEAR(undiscounted[0], 0.9 / 0.5 * 0.20, 1e-15);
}

TEST(MuAsymptotic, ZeroSignsGiveZero) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  EXPECT_EQ(mu_asymptotic(sol, signs({0, 0}), signs({0, 0})).cwiseAbs().maxCoeff(),
            0.0);
  EXPECT_THROW(mu_asymptotic(sol, signs({1}), signs({0, 0})), ValidationError);
}

TEST(MuAsymptotic, OddAndBoundedOverAllPatterns) {
  for (const auto& nm : testing::regression_suite()) {
    const RiccatiSolution sol = solve_riccati(nm.model, nm.alpha);
    if (nm.alpha * sol.acl_radius >= 1.0) continue;
    const Vector bound = mu_bound(sol);
    const int n = nm.model.n(), m = nm.model.m();
    int total = 1;
    for (int i = 0; i < n + m; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      SignVector sx(n), su(m);
      int c = code;
      for (int i = 0; i < n; ++i, c /= 3) sx[i] = c % 3 - 1;
      for (int i = 0; i < m; ++i, c /= 3) su[i] = c % 3 - 1;
      const Vector mu = mu_asymptotic(sol, sx, su);
      const Vector neg = mu_asymptotic(sol, -sx, -su);
      EXPECT_LE((mu + neg).cwiseAbs().maxCoeff(), 1e-14) << nm.name;
      EXPECT_TRUE((mu.cwiseAbs().array() <= bound.array() + 1e-8).all()) << nm.name;
    }
  }
}

TEST(MuRollout, ZeroWithoutMultiplicativeNoise) {
  SystemModel md = testing::two_state_model();
  md.sigma_bar_x.setZero();
  md.sigma_bar_u.setZero();
  const RiccatiSolution sol = solve_riccati(md, 0.9);
  RolloutOptions opt;
  opt.paths = 50;
  const MuEstimate est = mu_rollout(sol, Vector::Ones(2), linear(sol.G), opt);
  EXPECT_EQ(est.value.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(est.std_error.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MuRollout, DepthZeroIsSingleTerm) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  const Vector x = (Vector(2) << 0.7, -1.2).finished();
  RolloutOptions opt;
  opt.depth = 0;
  opt.paths = 10;
  const MuEstimate est = mu_rollout(sol, x, linear(sol.G), opt);
  const Vector expected =
      0.9 * (sol.forms.Wx * sign_vector(x).cast<double>() +
             sol.G.transpose() * sol.forms.Wu * sign_vector(sol.G * x).cast<double>());
  EXPECT_LE((est.value - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(est.depth, 0);
}

TEST(MuRollout, DefaultDepthFromTail) {
  const RiccatiSolution sol = scalar_solution(0.9, 0.5, -0.4, 0.24, 0.1);
  const int d = default_truncation_depth(sol);
  EXPECT_LE(std::pow(0.45, d), 1e-6);
  EXPECT_GT(std::pow(0.45, d - 1), 1e-6);
}

TEST(MuRollout, FrozenSignRegimeMatchesAsymptotic) {
  SystemModel md = SystemModel::deterministic(
      Matrix::Constant(1, 1, 0.8), Matrix::Constant(1, 1, 1.0),
      (Matrix(2, 1) << 1.0, 0.0).finished(), (Matrix(2, 1) << 0.0, 1.0).finished());
  md.sigma_x = Matrix::Constant(1, 1, 0.05);
  md.sigma_bar_x = Matrix::Constant(1, 1, 0.05);
  md.sigma_u = Matrix::Constant(1, 1, 0.05);
  md.sigma_bar_u = Matrix::Constant(1, 1, 0.05);
  const RiccatiSolution sol = solve_riccati(md, 0.9);
  ASSERT_GT(sol.Acl(0, 0), 0.0);
  ASSERT_LT(sol.G(0, 0), 0.0);
  RolloutOptions opt;
  opt.paths = 500;
  opt.seed = 4;
  for (double x0 : {1e7, -1e7}) {
    const MuEstimate est =
        mu_rollout(sol, Vector::Constant(1, x0), linear(sol.G), opt);
    const int s = x0 > 0 ? 1 : -1;
    const Vector frozen = mu_asymptotic(sol, signs({s}), signs({-s}));
    const double tol = std::max(3.0 * est.std_error[0], 1e-5 * std::abs(frozen[0]));
    EXPECT_NEAR(est.value[0], frozen[0], tol);
    EXPECT_LE(std::abs(est.value[0]), est.bound[0] + 1e-8);
  }
}

TEST(MuRollout, BoundedOnSampledStates) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  Rng rng(12);
  RolloutOptions opt;
  opt.paths = 200;
  for (int i = 0; i < 10; ++i) {
    const Vector x = testing::random_vector(rng, 2, 2.0);
    opt.seed = i;
    const MuEstimate est = mu_rollout(sol, x, linear(sol.G), opt);
    EXPECT_TRUE((est.value.cwiseAbs().array() <= est.bound.array() + 1e-8).all());
  }
}

TEST(MuRollout, DeterministicAcrossCalls) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  RolloutOptions opt;
  opt.paths = 100;
  opt.seed = 99;
  const Vector x = (Vector(2) << 0.1, -0.3).finished();
  const MuEstimate a = mu_rollout(sol, x, linear(sol.G), opt);
  const MuEstimate b = mu_rollout(sol, x, linear(sol.G), opt);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MuRollout, StandardErrorShrinksAtRootRate) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  const Vector x = Vector::Zero(2);
  std::vector<double> lp, le;
  for (int paths : {100, 1000, 10000}) {
    RolloutOptions opt;
    opt.paths = paths;
    opt.seed = 21;
    const MuEstimate est = mu_rollout(sol, x, linear(sol.G), opt);
    lp.push_back(std::log(static_cast<double>(paths)));
    le.push_back(std::log(est.std_error.norm()));
  }
  const double mx = (lp[0] + lp[1] + lp[2]) / 3.0, my = (le[0] + le[1] + le[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lp[i] - mx) * (le[i] - my);
    sxx += (lp[i] - mx) * (lp[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, -0.6);
  EXPECT_LE(slope, -0.4);
}

TEST(MuRollout, RejectsEmptyBatch) {
  const RiccatiSolution sol = solve_riccati(testing::two_state_model(), 0.9);
  RolloutOptions opt;
  opt.paths = 0;
  EXPECT_THROW(mu_rollout(sol, Vector::Zero(2), linear(sol.G), opt), ValidationError);
}

TEST(MuKindNames, RoundTrip) {
  for (MuKind k : {MuKind::zero, MuKind::asymptotic, MuKind::rollout}) {
    EXPECT_EQ(mu_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(mu_kind_from_string("exact"), ValidationError);
}

}  // namespace
}  // namespace csviu
