#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mor/linalg.hpp"
#include "mor/reduce.hpp"

namespace mor {
namespace {

// L with P = L L^T for symmetric positive semidefinite P (negative rounding
// noise in the spectrum is clipped).
Mat sqrt_factor(const Mat& P) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (P + P.transpose()));
  const Vec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

}  // namespace

ReducedModel fwbt(const StateSpace& G, const WeightFilter& W, int order) {
  if (!is_stable(G)) fail(ErrorKind::NonStableSystem, "fwbt needs a stable system");
  const Eigen::Index n = G.order();
  if (order < 1 || order > n) {
    fail(ErrorKind::UsageError, "reduced order must lie in [1, " + std::to_string(n) + "]");
  }
  if (G.inputs() != W.m()) {
    fail(ErrorKind::DimensionMismatch, "system inputs do not match weight outputs");
  }
  // Input-weighted controllability Gramian: leading block of the cascade Gramian.
  const StateSpace GW = cascade_with_weight(G, W);
  const Mat Pc = linalg::solve_lyapunov(GW.A(), Mat(GW.B() * GW.B().transpose()));
  const Mat P = Pc.topLeftCorner(n, n);
  const Mat Q = linalg::solve_lyapunov(Mat(G.A().transpose()), Mat(G.C().transpose() * G.C()));

  const Mat LP = sqrt_factor(P);
  const Mat LQ = sqrt_factor(Q);
  Eigen::JacobiSVD<Mat> svd(LQ.transpose() * LP, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& hsv = svd.singularValues();
  Eigen::Index k = 0;
  while (k < std::min<Eigen::Index>(order, hsv.size()) && hsv(k) > 1e-13 * hsv(0)) ++k;
  if (k == 0) fail(ErrorKind::RankDeficient, "Gramians are numerically zero");

  const Vec sinv = hsv.head(k).cwiseSqrt().cwiseInverse();
  const Mat Tl = sinv.asDiagonal() * svd.matrixU().leftCols(k).transpose() * LQ.transpose();
  const Mat Tr = LP * svd.matrixV().leftCols(k) * sinv.asDiagonal();

  ReducedModel model;
  model.method = "fwbt";
  model.requested_order = order;
  model.system = StateSpace(Mat(Tl * G.A() * Tr), Mat(Tl * G.B()), Mat(G.C() * Tr), G.D());
  model.projection.V = Tr;
  model.projection.W = Tl.transpose();
  model.hankel = hsv;
  model.stable = is_stable(model.system);
  model.converged = true;
  if (model.stable) {
    try {
      model.Zr = linalg::solve_sylvester(
          model.system.A(), Mat(W.A().transpose()),
          Mat(model.system.B() * (W.C() * W.Pw() + W.D() * W.B().transpose())));
      model.diagnostics = residual_report(G, model.system, W);
      model.has_diagnostics = true;
    } catch (const Error&) {
      model.has_diagnostics = false;
    }
  }
  return model;
}

}  // namespace mor
