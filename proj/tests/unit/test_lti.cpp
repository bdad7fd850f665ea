#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mor/lti.hpp"
#include "support/oracles.hpp"
#include "support/random_systems.hpp"

using namespace mor;

namespace {

StateSpace first_order() {
  return StateSpace(Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::UsageError;  // sentinel: nothing thrown
}

}  // namespace

TEST(StateSpace, ValidatesShapes) {
  EXPECT_EQ(kind_of([] { StateSpace(Mat::Zero(2, 2), Mat::Zero(3, 1), Mat::Zero(1, 2)); }),
            ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { StateSpace(Mat::Zero(2, 3), Mat::Zero(2, 1), Mat::Zero(1, 2)); }),
            ErrorKind::DimensionMismatch);
  const StateSpace g = first_order();
  EXPECT_EQ(g.D().rows(), 1);
  EXPECT_EQ(g.D()(0, 0), 0.0);
}

TEST(Transfer, FirstOrderValues) {
  const StateSpace g = first_order();
  EXPECT_NEAR(std::abs(eval_transfer(g, 0.0)(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_transfer(g, cplx(0, 1))(0, 0) - 1.0 / cplx(1, 1)), 0.0, 1e-15);
  EXPECT_EQ(kind_of([&] { eval_transfer(g, -1.0); }), ErrorKind::PoleHit);
}

TEST(Transfer, PoleResidueAgrees) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    StateSpace g = mor::testing::random_system(rng, 6, 2, 3);
    g = g.with_D(mor::testing::random_matrix(rng, 2, 3));
    const PoleResidue pr = to_pole_residue(g);
    for (cplx s : {cplx(0.3, 1.0), cplx(2.0, -0.5), cplx(0.0, 7.0)}) {
      const CMat a = eval_transfer(g, s), b = pr.evaluate(s);
      EXPECT_LT((a - b).norm(), 1e-10 * a.norm());
      EXPECT_LT((a - mor::testing::tf(g, s)).norm(), 1e-12 * a.norm());
    }
  }
}

TEST(H2, FirstOrderNorm) {
  EXPECT_NEAR(h2_norm(first_order()), std::sqrt(0.5), 1e-15);
  // <1/(s+1), 1/(s+2)> = 1/3
  const StateSpace h(Mat::Constant(1, 1, -2.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
  EXPECT_NEAR(h2_inner(first_order(), h), 1.0 / 3.0, 1e-15);
}

TEST(H2, InnerMatchesQuadrature) {
  std::mt19937_64 rng(8);
  const StateSpace g = mor::testing::random_system(rng, 5, 2, 2);
  const StateSpace h = mor::testing::random_system(rng, 4, 2, 2);
  const double q = mor::testing::quad_inner([&](cplx s) -> CMat { return eval_transfer(g, s); },
                                            [&](cplx s) -> CMat { return eval_transfer(h, s); });
  EXPECT_NEAR(h2_inner(g, h), q, 1e-8 * (1 + std::abs(q)));
}

TEST(H2, Errors) {
  const StateSpace g = first_order();
  EXPECT_EQ(kind_of([&] { h2_norm(g.with_D(Mat::Ones(1, 1))); }), ErrorKind::InfiniteNorm);
  const StateSpace u(Mat::Constant(1, 1, 1.0), Mat::Ones(1, 1), Mat::Ones(1, 1));
  EXPECT_EQ(kind_of([&] { h2_norm(u); }), ErrorKind::NonStableSystem);
  const StateSpace two(Mat::Constant(1, 1, -1.0), Mat::Ones(1, 2), Mat::Ones(1, 1));
  EXPECT_EQ(kind_of([&] { h2_inner(g, two); }), ErrorKind::DimensionMismatch);
}

TEST(Hinf, SampledFirstOrder) {
  EXPECT_NEAR(hinf_norm_sampled(first_order(), {0.0, 1.0, 10.0}), 1.0, 1e-15);
  const auto w = logspace(1e-2, 1e2, 5);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  EXPECT_NEAR(w[4], 100.0, 1e-12);
}

TEST(Difference, TransferIsDifference) {
  std::mt19937_64 rng(4);
  const StateSpace g = mor::testing::random_system(rng, 4, 2, 1);
  const StateSpace h = mor::testing::random_system(rng, 3, 2, 1);
  const StateSpace d = difference(g, h);
  EXPECT_EQ(d.order(), 7);
  const cplx s(0.1, 2.0);
  EXPECT_LT((eval_transfer(d, s) - eval_transfer(g, s) + eval_transfer(h, s)).norm(), 1e-13);
  EXPECT_NEAR(h2_norm(difference(g, g)), 0.0, 1e-7);
}
