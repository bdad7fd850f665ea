#include "mor/fmap.hpp"

#include <cmath>
#include <sstream>

#include "mor/linalg.hpp"

namespace mor {

WeightFilter::WeightFilter(Mat Aw, Mat Bw, Mat Cw, Mat Dw)
    : Aw_(std::move(Aw)), Bw_(std::move(Bw)), Cw_(std::move(Cw)), Dw_(std::move(Dw)) {
  // Reuse the realization checks of StateSpace.
  StateSpace check(Aw_, Bw_, Cw_, Dw_);
  (void)check;
  if (!is_stable(Aw_)) {
    fail(ErrorKind::NonStableSystem, "weight filter A_w is not stable");
  }
  const auto sd = linalg::spectral(Aw_);
  gamma_ = sd.eigenvalues;
  const Eigen::Index nw = Aw_.rows();
  if (nw > 0) {
    e_ = Cw_.cast<cplx>() * sd.R;
    f_ = sd.R.partialPivLu().solve(Bw_.cast<cplx>()).transpose();
  } else {
    e_.resize(Dw_.rows(), 0);
    f_.resize(Dw_.cols(), 0);
  }
  Pw_ = linalg::solve_lyapunov(Aw_, Mat(Bw_ * Bw_.transpose()));
}

WeightFilter WeightFilter::identity(Eigen::Index m) {
  return constant(Mat::Identity(m, m));
}

WeightFilter WeightFilter::constant(const Mat& Dw) {
  return WeightFilter(Mat(0, 0), Mat(0, Dw.cols()), Mat(Dw.rows(), 0), Dw);
}

CMat WeightFilter::eval(cplx s) const { return eval_transfer(as_state_space(), s); }

void validate_membership(const StateSpace& G, const WeightFilter& W) {
  if (G.inputs() != W.m()) {
    std::ostringstream os;
    os << "system has " << G.inputs() << " inputs but the weight has " << W.m()
       << " outputs";
    fail(ErrorKind::NotInWeightedH2, os.str());
  }
  if (!is_stable(G)) fail(ErrorKind::NotInWeightedH2, "system is not stable");
  const double dd = (G.D() * W.D()).norm();
  if (dd > 1e-12 * (1.0 + G.D().norm() * W.D().norm())) {
    std::ostringstream os;
    os << "D*D_w is nonzero (norm " << dd << ")";
    fail(ErrorKind::NotInWeightedH2, os.str());
  }
}

Mat FRealization::A_F() const {
  Mat out = Mat::Zero(order(), order());
  out.topLeftCorner(n(), n()) = A;
  out.topRightCorner(n(), nw()) = BCw;
  out.bottomRightCorner(nw(), nw()) = Aw;
  return out;
}

StateSpace FRealization::as_state_space() const { return StateSpace(A_F(), BF, CF); }

FRealization build_f_realization(const StateSpace& G, const WeightFilter& W) {
  validate_membership(G, W);
  FRealization F;
  const Eigen::Index n = G.order(), nw = W.order();
  F.A = G.A();
  F.BCw = G.B() * W.C();
  F.Aw = W.A();
  F.Pw = W.Pw();
  Mat rhs = G.B() * (W.C() * W.Pw() + W.D() * W.B().transpose());
  F.Z = linalg::solve_sylvester(G.A(), Mat(W.A().transpose()), rhs);
  F.BF.resize(n + nw, G.inputs());
  F.BF.topRows(n) = F.Z * W.C().transpose() + G.B() * W.D() * W.D().transpose();
  F.BF.bottomRows(nw) = W.Pw() * W.C().transpose() + W.B() * W.D().transpose();
  F.CF.resize(G.outputs(), n + nw);
  F.CF.leftCols(n) = G.C();
  F.CF.rightCols(nw) = G.D() * W.C();
  return F;
}

namespace {

Eigen::PartialPivLU<CMat> shifted_lu(const Mat& A, cplx s) {
  CMat M = -A.cast<cplx>();
  M.diagonal().array() += s;
  Eigen::PartialPivLU<CMat> lu(M);
  if (A.rows() > 0 && !(lu.rcond() > 1e-12)) {
    std::ostringstream os;
    os << "s = " << s << " is numerically an eigenvalue of the F realization";
    fail(ErrorKind::PoleHit, os.str());
  }
  return lu;
}

}  // namespace

Resolvent::Resolvent(const FRealization& F, cplx s)
    : F_(&F), lu_a_(shifted_lu(F.A, s)), lu_w_(shifted_lu(F.Aw, s)) {}

CMat Resolvent::solve(const CMat& y) const {
  const Eigen::Index n = F_->n(), nw = F_->nw();
  CMat x(n + nw, y.cols());
  if (nw > 0) x.bottomRows(nw) = lu_w_.solve(y.bottomRows(nw));
  CMat top = y.topRows(n);
  if (nw > 0) top += F_->BCw.cast<cplx>() * x.bottomRows(nw);
  if (n > 0) x.topRows(n) = lu_a_.solve(top);
  return x;
}

CMat Resolvent::solve_transpose(const CMat& y) const {
  const Eigen::Index n = F_->n(), nw = F_->nw();
  CMat x(n + nw, y.cols());
  if (n > 0) x.topRows(n) = lu_a_.transpose().solve(y.topRows(n));
  if (nw > 0) {
    CMat bot = y.bottomRows(nw);
    if (n > 0) bot += F_->BCw.transpose().cast<cplx>() * x.topRows(n);
    x.bottomRows(nw) = lu_w_.transpose().solve(bot);
  }
  return x;
}

CMat eval_f(const FRealization& F, cplx s) {
  Resolvent R(F, s);
  return F.CF.cast<cplx>() * R.solve(F.BF.cast<cplx>());
}

CMat eval_f_derivative(const FRealization& F, cplx s) {
  Resolvent R(F, s);
  return -F.CF.cast<cplx>() * R.solve(R.solve(F.BF.cast<cplx>()));
}

Mat f_impulse_at_zero(const FRealization& F) { return F.CF * F.BF; }

StateSpace cascade_with_weight(const StateSpace& G, const WeightFilter& W) {
  if (G.inputs() != W.m()) {
    fail(ErrorKind::DimensionMismatch, "system inputs do not match weight outputs");
  }
  const Eigen::Index n = G.order(), nw = W.order();
  Mat A = Mat::Zero(n + nw, n + nw);
  A.topLeftCorner(n, n) = G.A();
  A.topRightCorner(n, nw) = G.B() * W.C();
  A.bottomRightCorner(nw, nw) = W.A();
  Mat B(n + nw, W.mw());
  B.topRows(n) = G.B() * W.D();
  B.bottomRows(nw) = W.B();
  Mat C(G.outputs(), n + nw);
  C.leftCols(n) = G.C();
  C.rightCols(nw) = G.D() * W.C();
  return StateSpace(A, B, C, G.D() * W.D());
}

ConstantInner weighted_inner_with_constant(const StateSpace& G, const Mat& DH,
                                           const WeightFilter& W) {
  validate_membership(G, W);
  if (DH.rows() != G.outputs() || DH.cols() != G.inputs()) {
    fail(ErrorKind::NotInWeightedH2, "constant operand has the wrong shape");
  }
  const double dd = (DH * W.D()).norm();
  if (dd > 1e-12 * (1.0 + DH.norm() * W.D().norm())) {
    fail(ErrorKind::NotInWeightedH2, "D_H*D_w is nonzero");
  }
  if (W.order() == 0 || DH.norm() == 0.0) return {0.0, 0.0};
  const FRealization F = build_f_realization(G, W);
  const Mat CwT_DHT = W.C().transpose() * DH.transpose();
  const double full =
      (G.C() * F.Z * CwT_DHT).trace() + (G.D() * W.C() * W.Pw() * CwT_DHT).trace();
  return {full, 0.5 * full};
}

double weighted_h2_inner(const StateSpace& G, const StateSpace& H, const WeightFilter& W) {
  validate_membership(G, W);
  validate_membership(H, W);
  if (G.outputs() != H.outputs()) {
    fail(ErrorKind::DimensionMismatch, "operands have different output counts");
  }
  const FRealization F = build_f_realization(G, W);
  Mat X = linalg::solve_sylvester(F.A_F(), Mat(H.A().transpose()),
                                  Mat(F.BF * H.B().transpose()));
  const double strict = (F.CF * X * H.C().transpose()).trace();
  return strict + weighted_inner_with_constant(G, H.D(), W).full;
}

double weighted_h2_norm(const StateSpace& G, const WeightFilter& W) {
  return std::sqrt(std::max(0.0, weighted_h2_inner(G, G, W)));
}

double weighted_error_norm(const StateSpace& G, const StateSpace& Gr, const WeightFilter& W) {
  if (G.inputs() != Gr.inputs() || G.outputs() != Gr.outputs()) {
    fail(ErrorKind::DimensionMismatch, "full and reduced systems have different shapes");
  }
  if (G.inputs() != W.m()) {
    fail(ErrorKind::NotInWeightedH2, "system inputs do not match weight outputs");
  }
  if (!is_stable(G)) fail(ErrorKind::NotInWeightedH2, "full system is not stable");
  if (!is_stable(Gr)) fail(ErrorKind::NotInWeightedH2, "reduced system is not stable");
  const Mat dD = G.D() - Gr.D();
  const double dd = (dD * W.D()).norm();
  if (dd > 1e-12 * (1.0 + dD.norm() * W.D().norm())) {
    fail(ErrorKind::InfiniteNorm, "(D - D_r)*D_w is nonzero");
  }
  const StateSpace E = cascade_with_weight(difference(G, Gr), W);
  const Mat P = linalg::solve_lyapunov(E.A(), Mat(E.B() * E.B().transpose()));
  const double sq = (E.C() * P * E.C().transpose()).trace();
  return std::sqrt(std::max(0.0, sq));
}

namespace {

// (1/2pi) Re tr(conj(K_G) K_H^T) with K = X(i w) W(i w).
double integrand(const StateSpace& G, const StateSpace& H, const WeightFilter& W, double w) {
  const cplx s(0.0, w);
  const CMat Ws = W.eval(s);
  const CMat KG = eval_transfer(G, s) * Ws;
  const CMat KH = eval_transfer(H, s) * Ws;
  return (KG.conjugate().cwiseProduct(KH)).sum().real() / (2.0 * M_PI);
}

struct QuadEstimate {
  double value;
  double abs_value;
};

QuadEstimate integrate(const StateSpace& G, const StateSpace& H, const WeightFilter& W,
                       double wmin, double wmax, int points) {
  const std::vector<double> w = logspace(wmin, wmax, points);
  std::vector<double> f(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) f[i] = integrand(G, H, W, w[i]);
  const double f0 = integrand(G, H, W, 0.0);
  double sum = 0.5 * (f0 + f[0]) * w[0];
  double asum = 0.5 * (std::abs(f0) + std::abs(f[0])) * w[0];
  const double h = std::log(w[1] / w[0]);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double a = f[i] * w[i], b = f[i + 1] * w[i + 1];
    sum += 0.5 * h * (a + b);
    asum += 0.5 * h * (std::abs(a) + std::abs(b));
  }
  sum += f.back() * w.back();
  asum += std::abs(f.back()) * w.back();
  return {2.0 * sum, 2.0 * asum};
}

}  // namespace

double quadrature_weighted_inner(const StateSpace& G, const StateSpace& H,
                                 const WeightFilter& W, const QuadratureConfig& cfg) {
  if (!is_stable(G) || !is_stable(H)) {
    fail(ErrorKind::NonStableSystem, "quadrature needs stable operands");
  }
  if (G.inputs() != W.m() || H.inputs() != W.m() || G.outputs() != H.outputs()) {
    fail(ErrorKind::DimensionMismatch, "quadrature operands have incompatible shapes");
  }
  double wmin = cfg.omega_min, wmax = cfg.omega_max;
  int points = std::max(cfg.points, 2);
  QuadEstimate prev = integrate(G, H, W, wmin, wmax, points);
  for (int r = 0; r < cfg.max_refinements; ++r) {
    wmin /= 10.0;
    wmax *= 10.0;
    points *= 2;
    const QuadEstimate cur = integrate(G, H, W, wmin, wmax, points);
    const double scale = std::max(std::abs(cur.value), 1e-6 * cur.abs_value);
    if (std::abs(cur.value - prev.value) <= cfg.rel_tol * scale) return cur.value;
    prev = cur;
  }
  std::ostringstream os;
  os << "quadrature did not settle after " << cfg.max_refinements << " refinements";
  fail(ErrorKind::NonConvergedQuadrature, os.str());
}

}  // namespace mor
