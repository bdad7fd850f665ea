#include "mor/optimality.hpp"

#include <algorithm>
#include <cmath>

#include "mor/linalg.hpp"

namespace mor {
namespace {

double relative(double abs_value, double denom, bool& fallback) {
  if (!(denom > 1e-300)) {
    fallback = fallback || abs_value > 0.0;
    return abs_value;
  }
  return abs_value / denom;
}

double vmax(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

double ResidualReport::max_right_rel() const { return vmax(right_rel); }
double ResidualReport::max_left_rel() const { return vmax(left_rel); }
double ResidualReport::max_bitangential_rel() const { return vmax(bitangential_rel); }

double ResidualReport::max_interpolatory_rel() const {
  return std::max({max_right_rel(), max_left_rel(), max_bitangential_rel(), kernel_rel});
}

double ResidualReport::max_halevi_rel() const {
  return std::max({rho_a_rel, rho_b_rel, rho_c_rel, rho_d_rel});
}

Mat weight_kernel(const WeightFilter& W, double rank_tol) {
  if (W.mw() == 0) return Mat::Identity(W.m(), W.m());
  return linalg::kernel_basis(Mat(W.D().transpose()), rank_tol);
}

ResidualReport interpolatory_residuals(const StateSpace& G, const StateSpace& Gr,
                                       const WeightFilter& W) {
  const FRealization F = build_f_realization(G, W);
  const FRealization Fr = build_f_realization(Gr, W);
  const PoleResidue pr = to_pole_residue(Gr);

  ResidualReport rep;
  rep.poles = pr.poles;
  const Eigen::Index r = pr.poles.size();
  for (Eigen::Index k = 0; k < r; ++k) {
    const cplx s = -pr.poles(k);
    const CVec b = pr.b.col(k);
    const CVec c = pr.c.col(k);
    const CMat f = eval_f(F, s);
    const CMat fr = eval_f(Fr, s);
    const CMat df = eval_f_derivative(F, s);
    const CMat dfr = eval_f_derivative(Fr, s);

    const double ra = ((f - fr) * b).norm();
    const double la = (c.transpose() * (f - fr)).norm();
    const double ha = std::abs((c.transpose() * (df - dfr) * b)(0, 0));
    rep.right_abs.push_back(ra);
    rep.left_abs.push_back(la);
    rep.bitangential_abs.push_back(ha);
    rep.right_rel.push_back(relative(ra, (f * b).norm(), rep.absolute_fallback));
    rep.left_rel.push_back(relative(la, (c.transpose() * f).norm(), rep.absolute_fallback));
    rep.bitangential_rel.push_back(
        relative(ha, std::abs((c.transpose() * df * b)(0, 0)), rep.absolute_fallback));
  }

  const Mat N = weight_kernel(W);
  if (N.cols() > 0) {
    const Mat F0 = f_impulse_at_zero(F);
    const Mat Fr0 = f_impulse_at_zero(Fr);
    rep.kernel_abs = ((F0 - Fr0) * N).norm();
    rep.kernel_rel = relative(rep.kernel_abs, (F0 * N).norm(), rep.absolute_fallback);
  }
  return rep;
}

HaleviSolution solve_halevi_system(const StateSpace& G, const StateSpace& Gr,
                                   const WeightFilter& W) {
  if (!is_stable(G) || !is_stable(Gr)) {
    fail(ErrorKind::NonStableSystem, "Halevi equations need stable systems");
  }
  const FRealization F = build_f_realization(G, W);
  validate_membership(Gr, W);
  const Eigen::Index n = G.order(), nw = W.order();
  const Mat& Ar = Gr.A();
  const Mat& Br = Gr.B();
  const Mat& Cr = Gr.C();
  const Mat AF = F.A_F();

  HaleviSolution h;
  h.X = linalg::solve_sylvester(AF, Mat(Ar.transpose()), Mat(F.BF * Br.transpose()));
  const Mat CwX = W.C() * h.X.bottomRows(nw);  // [0 C_w] X
  const Mat S = Br * CwX;
  const Mat rhs_p = S + S.transpose() + Br * W.D() * W.D().transpose() * Br.transpose();
  h.Pr = linalg::solve_sylvester(Ar, Mat(Ar.transpose()), rhs_p);
  h.Pr = 0.5 * (h.Pr + h.Pr.transpose());
  h.Qr = linalg::solve_sylvester(Mat(Ar.transpose()), Ar, Mat(Cr.transpose() * Cr));
  h.Qr = 0.5 * (h.Qr + h.Qr.transpose());

  Mat top(n + nw, G.outputs());
  top.topRows(n) = G.C().transpose();
  top.bottomRows(nw) = ((G.D() - Gr.D()) * W.C()).transpose();
  Mat rhs_y = top * Cr;
  rhs_y.bottomRows(nw) -= W.C().transpose() * Br.transpose() * h.Qr;
  h.Y = linalg::solve_sylvester(Mat(AF.transpose()), Ar, Mat(-rhs_y));
  return h;
}

ResidualReport halevi_residuals(const StateSpace& G, const StateSpace& Gr,
                                const WeightFilter& W) {
  const HaleviSolution h = solve_halevi_system(G, Gr, W);
  const FRealization F = build_f_realization(G, W);
  const Eigen::Index nw = W.order();
  const Mat CwX = W.C() * h.X.bottomRows(nw);   // [0 C_w] X,  m x r
  const Mat XtCwT = CwX.transpose();            // X^T [0; C_w^T], r x m

  ResidualReport rep;
  bool& fb = rep.absolute_fallback;

  const Mat a1 = h.Y.transpose() * h.X, a2 = h.Qr * h.Pr;
  rep.rho_a = (a1 + a2).norm();
  rep.rho_a_rel = relative(rep.rho_a, a1.norm() + a2.norm(), fb);

  const Mat b1 = F.CF * h.X, b2 = Gr.C() * h.Pr, b3 = Gr.D() * CwX;
  rep.rho_b = (b1 - b2 - b3).norm();
  rep.rho_b_rel = relative(rep.rho_b, b1.norm() + b2.norm() + b3.norm(), fb);

  const Mat c1 = h.Y.transpose() * F.BF;
  const Mat c2 = h.Qr * (Gr.B() * W.D() * W.D().transpose() + XtCwT);
  rep.rho_c = (c1 + c2).norm();
  rep.rho_c_rel = relative(rep.rho_c, c1.norm() + c2.norm(), fb);

  const Mat N = weight_kernel(W);
  if (N.cols() > 0 && nw > 0) {
    const Mat d1 = Gr.C() * XtCwT * N;
    const Mat d2 = G.C() * F.Z * W.C().transpose() * N;
    const Mat d3 = (G.D() - Gr.D()) * W.C() * W.Pw() * W.C().transpose() * N;
    rep.rho_d = (d1 - d2 - d3).norm();
    rep.rho_d_rel = relative(rep.rho_d, d1.norm() + d2.norm() + d3.norm(), fb);
  }
  return rep;
}

ResidualReport residual_report(const StateSpace& G, const StateSpace& Gr,
                               const WeightFilter& W) {
  ResidualReport rep = interpolatory_residuals(G, Gr, W);
  const ResidualReport h = halevi_residuals(G, Gr, W);
  rep.rho_a = h.rho_a;
  rep.rho_b = h.rho_b;
  rep.rho_c = h.rho_c;
  rep.rho_d = h.rho_d;
  rep.rho_a_rel = h.rho_a_rel;
  rep.rho_b_rel = h.rho_b_rel;
  rep.rho_c_rel = h.rho_c_rel;
  rep.rho_d_rel = h.rho_d_rel;
  rep.absolute_fallback = rep.absolute_fallback || h.absolute_fallback;
  return rep;
}

EquivalenceResult equivalence_check(const StateSpace& G, const StateSpace& Gr,
                                    const WeightFilter& W, double tol, double scale_factor) {
  EquivalenceResult out;
  out.report = residual_report(G, Gr, W);
  out.interpolatory_satisfied = out.report.max_interpolatory_rel() <= tol;
  out.halevi_satisfied = out.report.max_halevi_rel() <= tol * scale_factor;
  out.consistent = out.interpolatory_satisfied == out.halevi_satisfied;
  return out;
}

}  // namespace mor
