#include "mor/lti.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "mor/linalg.hpp"

namespace mor {
namespace {

void check_dims(const Mat& A, const Mat& B, const Mat& C, const Mat& D) {
  std::ostringstream os;
  if (A.rows() != A.cols()) {
    os << "A is " << A.rows() << "x" << A.cols() << ", expected square";
  } else if (B.rows() != A.rows()) {
    os << "B has " << B.rows() << " rows, A has order " << A.rows();
  } else if (C.cols() != A.rows()) {
    os << "C has " << C.cols() << " columns, A has order " << A.rows();
  } else if (D.rows() != C.rows() || D.cols() != B.cols()) {
    os << "D is " << D.rows() << "x" << D.cols() << ", expected " << C.rows() << "x"
       << B.cols();
  } else if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    os << "realization has non-finite entries";
  } else {
    return;
  }
  fail(ErrorKind::DimensionMismatch, os.str());
}

}  // namespace

StateSpace::StateSpace(Mat A, Mat B, Mat C, Mat D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  check_dims(A_, B_, C_, D_);
}

StateSpace::StateSpace(Mat A, Mat B, Mat C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
  D_ = Mat::Zero(C_.rows(), B_.cols());
  check_dims(A_, B_, C_, D_);
}

CMat PoleResidue::evaluate(cplx s) const {
  CMat out = D.cast<cplx>();
  for (Eigen::Index k = 0; k < poles.size(); ++k) {
    out += c.col(k) * b.col(k).transpose() / (s - poles(k));
  }
  return out;
}

CMat eval_transfer(const StateSpace& sys, cplx s) {
  const Eigen::Index n = sys.order();
  if (n == 0) return sys.D().cast<cplx>();
  CMat M = -sys.A().cast<cplx>();
  M.diagonal().array() += s;
  Eigen::PartialPivLU<CMat> lu(M);
  if (!(lu.rcond() > 1e-12)) {
    std::ostringstream os;
    os << "s = " << s << " is numerically a pole";
    fail(ErrorKind::PoleHit, os.str());
  }
  CMat X = lu.solve(sys.B().cast<cplx>());
  return sys.C().cast<cplx>() * X + sys.D().cast<cplx>();
}

PoleResidue to_pole_residue(const StateSpace& sys) {
  const auto sd = linalg::spectral(sys.A());
  PoleResidue pr;
  pr.poles = sd.eigenvalues;
  pr.D = sys.D();
  if (sys.order() == 0) {
    pr.b.resize(sys.inputs(), 0);
    pr.c.resize(sys.outputs(), 0);
    return pr;
  }
  Eigen::PartialPivLU<CMat> lu(sd.R);
  pr.b = lu.solve(sys.B().cast<cplx>()).transpose();
  pr.c = sys.C().cast<cplx>() * sd.R;
  return pr;
}

bool is_stable(const Mat& A, double stability_margin) {
  if (A.rows() == 0) return true;
  return linalg::max_real_part(A) < -stability_margin;
}

bool is_stable(const StateSpace& sys, double stability_margin) {
  return is_stable(sys.A(), stability_margin);
}

double h2_inner(const StateSpace& G, const StateSpace& H) {
  if (G.inputs() != H.inputs() || G.outputs() != H.outputs()) {
    fail(ErrorKind::DimensionMismatch, "H2 inner product operands have different shapes");
  }
  if (!is_stable(G) || !is_stable(H)) {
    fail(ErrorKind::NonStableSystem, "H2 inner product needs stable operands");
  }
  if (G.D().norm() != 0.0 || H.D().norm() != 0.0) {
    fail(ErrorKind::InfiniteNorm, "nonzero feedthrough has infinite H2 norm");
  }
  Mat X = linalg::solve_sylvester(G.A(), Mat(H.A().transpose()),
                                  Mat(G.B() * H.B().transpose()));
  return (G.C() * X * H.C().transpose()).trace();
}

double h2_norm(const StateSpace& G) {
  return std::sqrt(std::max(0.0, h2_inner(G, G)));
}

double hinf_norm_sampled(const StateSpace& sys, const std::vector<double>& omega) {
  double best = 0.0;
  for (double w : omega) {
    CMat g = eval_transfer(sys, cplx(0.0, w));
    if (g.size() == 0) continue;
    Eigen::JacobiSVD<CMat> svd(g);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

std::vector<double> logspace(double lo, double hi, int points) {
  std::vector<double> w;
  if (points <= 0) return w;
  if (points == 1) return {lo};
  const double a = std::log10(lo), b = std::log10(hi);
  w.reserve(points);
  for (int i = 0; i < points; ++i) {
    w.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  }
  return w;
}

StateSpace difference(const StateSpace& G, const StateSpace& H) {
  if (G.inputs() != H.inputs() || G.outputs() != H.outputs()) {
    fail(ErrorKind::DimensionMismatch, "difference of systems with different shapes");
  }
  const Eigen::Index n = G.order(), r = H.order();
  Mat A = Mat::Zero(n + r, n + r);
  A.topLeftCorner(n, n) = G.A();
  A.bottomRightCorner(r, r) = H.A();
  Mat B(n + r, G.inputs());
  B << G.B(), H.B();
  Mat C(G.outputs(), n + r);
  C << G.C(), -H.C();
  return StateSpace(A, B, C, G.D() - H.D());
}

}  // namespace mor
