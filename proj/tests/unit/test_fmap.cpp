#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mor/fmap.hpp"
#include "support/oracles.hpp"
#include "support/random_systems.hpp"

using namespace mor;

namespace {

// G = 1/(s+1), W = 1/(s+2).
StateSpace scalar_G() {
  return StateSpace(Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
}
WeightFilter scalar_W() {
  return WeightFilter(Mat::Constant(1, 1, -2.0), Mat::Ones(1, 1), Mat::Ones(1, 1),
                      Mat::Zero(1, 1));
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::UsageError;
}

}  // namespace

TEST(ScalarExample, Realization) {
  const FRealization F = build_f_realization(scalar_G(), scalar_W());
  EXPECT_NEAR(F.Pw(0, 0), 0.25, 1e-16);
  EXPECT_NEAR(F.Z(0, 0), 1.0 / 12, 1e-16);
  EXPECT_NEAR(F.BF(0, 0), 1.0 / 12, 1e-16);
  EXPECT_NEAR(F.BF(1, 0), 0.25, 1e-16);
  EXPECT_NEAR(std::abs(eval_f(F, 0.0)(0, 0) - 5.0 / 24), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_f(F, 1.0)(0, 0) - 1.0 / 12), 0.0, 1e-15);
  EXPECT_NEAR(f_impulse_at_zero(F)(0, 0), 1.0 / 12, 1e-16);
}

TEST(ScalarExample, WeightedNorm) {
  EXPECT_NEAR(weighted_h2_norm(scalar_G(), scalar_W()), std::sqrt(1.0 / 12), 1e-15);
  const StateSpace zero(Mat(0, 0), Mat(0, 1), Mat(1, 0), Mat::Zero(1, 1));
  EXPECT_NEAR(weighted_error_norm(scalar_G(), zero, scalar_W()), std::sqrt(1.0 / 12), 1e-15);
}

TEST(WeightFilter, PoleData) {
  std::mt19937_64 rng(2);
  const WeightFilter W = mor::testing::random_weight(rng, 4, 2);
  const cplx s(0.4, 1.3);
  CMat sum = W.D().cast<cplx>();
  for (Eigen::Index k = 0; k < W.order(); ++k) {
    sum += W.e().col(k) * W.f().col(k).transpose() / (s - W.gamma()(k));
  }
  EXPECT_LT((sum - W.eval(s)).norm(), 1e-11 * sum.norm());
  EXPECT_EQ(WeightFilter::identity(3).order(), 0);
  EXPECT_EQ(WeightFilter::identity(3).mw(), 3);
}

TEST(WeightFilter, RejectsUnstable) {
  EXPECT_EQ(kind_of([] {
              WeightFilter(Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Zero(1, 1));
            }),
            ErrorKind::NonStableSystem);
}

TEST(Membership, Clauses) {
  const StateSpace g = scalar_G();
  EXPECT_NO_THROW(validate_membership(g, scalar_W()));
  EXPECT_EQ(kind_of([&] { validate_membership(g.with_D(Mat::Ones(1, 1)), WeightFilter::identity(1)); }),
            ErrorKind::NotInWeightedH2);
  EXPECT_NO_THROW(validate_membership(g.with_D(Mat::Ones(1, 1)), scalar_W()));
  EXPECT_EQ(kind_of([&] { validate_membership(g, WeightFilter::identity(2)); }),
            ErrorKind::NotInWeightedH2);
}

TEST(Fmap, MatchesPoleResidueForm) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 5; ++t) {
    auto wk = mor::testing::random_weight_with_kernel(rng, 3, 2);
    StateSpace g = mor::testing::random_system(rng, 5, 2, 2);
    g = g.with_D(mor::testing::random_matrix(rng, 2, 1) * wk.kernel.transpose());
    const FRealization F = build_f_realization(g, wk.W);
    for (cplx s : {cplx(0.5, 0.0), cplx(1.0, 2.0), cplx(0.1, -4.0)}) {
      const CMat a = eval_f(F, s), b = mor::testing::fmap_pole_residue(g, wk.W, s);
      EXPECT_LT((a - b).norm(), 1e-9 * b.norm());
    }
  }
}

TEST(Fmap, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(18);
  const WeightFilter W = mor::testing::random_weight(rng, 3, 2);
  const StateSpace g = mor::testing::random_system(rng, 4, 1, 2);
  const FRealization F = build_f_realization(g, W);
  const cplx s(0.7, 0.9);
  const double h = 1e-5;
  const CMat fd = (eval_f(F, s + h) - eval_f(F, s - h)) / (2 * h);
  const CMat d = eval_f_derivative(F, s);
  EXPECT_LT((fd - d).norm(), 1e-8 * d.norm());
}

TEST(Fmap, ResolventSolvesBothSides) {
  std::mt19937_64 rng(19);
  const WeightFilter W = mor::testing::random_weight(rng, 3, 2);
  const StateSpace g = mor::testing::random_system(rng, 4, 1, 2);
  const FRealization F = build_f_realization(g, W);
  const cplx s(0.3, 1.1);
  const Resolvent R(F, s);
  const CMat M = s * CMat::Identity(7, 7) - F.A_F().cast<cplx>();
  const CMat y = CMat::Random(7, 2);
  EXPECT_LT((M * R.solve(y) - y).norm(), 1e-12);
  EXPECT_LT((M.transpose() * R.solve_transpose(y) - y).norm(), 1e-12);
}

TEST(Fmap, ConstantWeight) {
  Mat Dw(2, 2);
  Dw << 1, 0.5, 0, 2;
  std::mt19937_64 rng(1);
  const StateSpace g = mor::testing::random_system(rng, 3, 1, 2);
  const FRealization F = build_f_realization(g, WeightFilter::constant(Dw));
  const cplx s(0.2, 0.4);
  const CMat expect = eval_transfer(g, s) * (Dw * Dw.transpose()).cast<cplx>();
  EXPECT_LT((eval_f(F, s) - expect).norm(), 1e-13 * expect.norm());
}

TEST(WeightedInner, SelfAdjointAndQuadrature) {
  std::mt19937_64 rng(23);
  const WeightFilter W = mor::testing::random_weight(rng, 3, 2);
  const StateSpace g = mor::testing::random_system(rng, 4, 2, 2);
  const StateSpace h = mor::testing::random_system(rng, 3, 2, 2);
  const double gh = weighted_h2_inner(g, h, W), hg = weighted_h2_inner(h, g, W);
  EXPECT_NEAR(gh, hg, 1e-10 * (1 + std::abs(gh)));
  const double cascade = h2_inner(cascade_with_weight(g, W), cascade_with_weight(h, W));
  EXPECT_NEAR(gh, cascade, 1e-10 * (1 + std::abs(gh)));
  const double q = quadrature_weighted_inner(g, h, W);
  EXPECT_NEAR(gh, q, 1e-5 * (1 + std::abs(gh)));
  const double q2 = mor::testing::quad_weighted_inner(g, h, W);
  EXPECT_NEAR(gh, q2, 1e-6 * (1 + std::abs(gh)));
}

TEST(WeightedInner, ConstantHalfFactor) {
  std::mt19937_64 rng(24);
  auto wk = mor::testing::random_weight_with_kernel(rng, 2, 2);
  const StateSpace g = mor::testing::random_system(rng, 4, 2, 2);
  const Mat DH = mor::testing::random_matrix(rng, 2, 1) * wk.kernel.transpose();
  const ConstantInner ci = weighted_inner_with_constant(g, DH, wk.W);
  EXPECT_NEAR(ci.f_side, 0.5 * ci.full, 1e-14 * (1 + std::abs(ci.full)));
  const StateSpace h(Mat(0, 0), Mat(0, 2), Mat(2, 0), DH);
  EXPECT_NEAR(ci.full, mor::testing::quad_weighted_inner(g, h, wk.W), 1e-6 * (1 + std::abs(ci.full)));
}

TEST(WeightedError, Errors) {
  const StateSpace g = scalar_G();
  EXPECT_EQ(kind_of([&] { weighted_error_norm(g, g.with_D(Mat::Ones(1, 1)), WeightFilter::identity(1)); }),
            ErrorKind::InfiniteNorm);
  const StateSpace u(Mat::Constant(1, 1, 1.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
  EXPECT_EQ(kind_of([&] { weighted_error_norm(g, u, scalar_W()); }), ErrorKind::NotInWeightedH2);
  EXPECT_NEAR(weighted_error_norm(g, g, scalar_W()), 0.0, 1e-7);
}
