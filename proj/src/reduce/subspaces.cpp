#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "mor/linalg.hpp"
#include "mor/reduce.hpp"

namespace mor {
namespace {

bool is_real_shift(cplx s) { return std::abs(s.imag()) <= 1e-10 * (1.0 + std::abs(s)); }

bool has_upper_partner(const CVec& shifts, Eigen::Index i) {
  const cplx target = std::conj(shifts(i));
  for (Eigen::Index j = 0; j < shifts.size(); ++j) {
    if (j != i && shifts(j).imag() > 0 &&
        std::abs(shifts(j) - target) <= 1e-10 * (1.0 + std::abs(target))) {
      return true;
    }
  }
  return false;
}

// Real basis for the span of the columns of X together with their conjugates.
Mat realify(const CMat& X, const CVec& shifts, std::vector<ColumnSource>* prov) {
  Mat out(X.rows(), 2 * X.cols());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const cplx s = shifts(i);
    if (is_real_shift(s)) {
      out.col(k++) = X.col(i).real();
      if (prov) prov->push_back({ColumnSource::Kind::RealShift, s});
      continue;
    }
    if (s.imag() < 0 && has_upper_partner(shifts, i)) continue;
    out.col(k++) = X.col(i).real();
    out.col(k++) = X.col(i).imag();
    if (prov) {
      prov->push_back({ColumnSource::Kind::RealPart, s});
      prov->push_back({ColumnSource::Kind::ImagPart, s});
    }
  }
  return out.leftCols(k);
}

}  // namespace

std::pair<CMat, CMat> build_subspaces(const FRealization& F, const InterpolationData& data) {
  const Eigen::Index r = data.shifts.size();
  if (data.b.cols() != r || data.c.cols() != r || data.b.rows() != F.BF.cols() ||
      data.c.rows() != F.CF.rows()) {
    fail(ErrorKind::DimensionMismatch, "interpolation data does not match the realization");
  }
  CMat V(F.order(), r), Wm(F.order(), r);
  const CMat BF = F.BF.cast<cplx>();
  const CMat CFt = F.CF.transpose().cast<cplx>();
  for (Eigen::Index i = 0; i < r; ++i) {
    Resolvent R(F, data.shifts(i));
    V.col(i) = R.solve(BF * data.b.col(i));
    Wm.col(i) = R.solve_transpose(CFt * data.c.col(i));
  }
  return {V, Wm};
}

ProjectionPair extract_projection(const CMat& Vraw, const CMat& Wraw, Eigen::Index n,
                                  const CVec& shifts, const Mat& extra) {
  ProjectionPair p;
  Mat Vr = realify(Vraw.topRows(n), shifts, &p.provenance);
  Mat Wr = realify(Wraw.topRows(n), shifts, nullptr);
  if (extra.cols() > 0) {
    Mat Vx(n, Vr.cols() + extra.cols()), Wx(n, Wr.cols() + extra.cols());
    Vx << Vr, extra;
    Wx << Wr, extra;
    Vr = std::move(Vx);
    Wr = std::move(Wx);
    for (Eigen::Index j = 0; j < extra.cols(); ++j) {
      p.provenance.push_back({ColumnSource::Kind::RangeZ, cplx(0.0, 0.0)});
    }
  }
  if (Vr.cols() > n) {
    fail(ErrorKind::RankDeficient, "more projection columns than states");
  }
  auto [V, W] = linalg::biorthonormalize(Vr, Wr);
  p.V = std::move(V);
  p.W = std::move(W);
  return p;
}

Feedthrough compute_feedthrough(const StateSpace& G, const WeightFilter& W,
                                const FRealization& F, const ProjectionPair& proj,
                                const Mat& Ar, const Mat& Br) {
  Feedthrough out;
  const Eigen::Index r = Ar.rows(), nw = W.order();
  out.Dr = Mat::Zero(G.outputs(), G.inputs());
  out.Zr = linalg::solve_sylvester(
      Ar, Mat(W.A().transpose()), Mat(Br * (W.C() * W.Pw() + W.D() * W.B().transpose())));
  if (nw == 0 || r == 0) return out;
  const Mat N = weight_kernel(W);
  if (N.cols() == 0) return out;
  const Mat CwN = W.C().transpose() * N;  // n_w x l
  const Mat M = CwN.transpose() * W.Pw() * CwN;
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Vec sinv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-12 * smax && s(i) > 0.0) {
      sinv(i) = 1.0 / s(i);
    } else {
      out.regularized = true;
    }
  }
  const Mat Mpinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
  const Mat E = F.Z - proj.V * out.Zr;
  out.Dr = G.C() * E * CwN * Mpinv * N.transpose();
  return out;
}

double shift_change(const CVec& old_shifts, const CVec& new_shifts) {
  auto sorted = [](const CVec& v) {
    std::vector<cplx> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end(), [](cplx a, cplx b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    return s;
  };
  const auto a = sorted(old_shifts), b = sorted(new_shifts);
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(a[i]), 1e-300);
    m = std::max(m, std::abs(b[i] - a[i]) / denom);
  }
  return m;
}

InterpolationGap interpolation_gap(const StateSpace& G, const WeightFilter& W,
                                   const ReducedModel& model, cplx sigma, const CVec& b,
                                   const CVec& c) {
  const StateSpace G0 = G.with_D(Mat::Zero(G.outputs(), G.inputs()));
  const FRealization F = build_f_realization(G0, W);
  const StateSpace& Gr = model.system;
  const Eigen::Index nw = W.order();
  const Mat Zr = linalg::solve_sylvester(
      Gr.A(), Mat(W.A().transpose()),
      Mat(Gr.B() * (W.C() * W.Pw() + W.D() * W.B().transpose())));
  const CMat E = (F.Z - model.projection.V * Zr).cast<cplx>();  // n x n_w

  auto shifted = [](const Mat& A, cplx s) {
    CMat M = -A.cast<cplx>();
    M.diagonal().array() += s;
    Eigen::PartialPivLU<CMat> lu(M);
    if (A.rows() > 0 && !(lu.rcond() > 1e-12)) {
      fail(ErrorKind::PoleHit, "interpolation point is a pole of the reduced model or weight");
    }
    return lu;
  };
  const auto lur = shifted(Gr.A(), sigma);
  const CMat Cr = Gr.C().cast<cplx>();
  const CMat WrT = model.projection.W.transpose().cast<cplx>();
  const CMat R1 = lur.solve(WrT);
  const CMat H1 = Cr * R1;
  const CMat dH1 = -Cr * lur.solve(R1);

  CMat H2 = CMat::Zero(nw, G.inputs());
  CMat dH2 = CMat::Zero(nw, G.inputs());
  const Mat N = weight_kernel(W);
  if (nw > 0 && N.cols() > 0) {
    const Mat CwN = W.C().transpose() * N;
    const Mat M = CwN.transpose() * W.Pw() * CwN;
    Eigen::PartialPivLU<Mat> lum(M);
    if (!(lum.rcond() > 1e-12)) {
      fail(ErrorKind::SingularOperator, "N^T C_w P_w C_w^T N is singular");
    }
    const CMat left = (CwN * lum.solve(Mat(N.transpose())) * W.C()).cast<cplx>();
    const CMat rhs = (W.Pw() * W.C().transpose() + W.B() * W.D().transpose()).cast<cplx>();
    const auto luw = shifted(W.A(), sigma);
    const CMat R2 = luw.solve(rhs);
    H2 = left * R2;
    dH2 = -left * luw.solve(R2);
  }
  const CMat C = G.C().cast<cplx>();
  const CMat CwT = W.C().transpose().cast<cplx>();
  InterpolationGap gap;
  gap.right = H1 * E * CwT * b - C * E * H2 * b;
  gap.left = (c.transpose() * H1 * E * CwT - c.transpose() * C * E * H2).transpose();
  gap.bitangential =
      (c.transpose() * dH1 * E * CwT * b - c.transpose() * C * E * dH2 * b)(0, 0);
  return gap;
}

}  // namespace mor
