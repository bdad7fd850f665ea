#pragma once

#include <utility>

#include <Eigen/LU>

#include "mor/lti.hpp"

namespace mor {

/// Input shaping filter W(s) = C_w (sI - A_w)^{-1} B_w + D_w, m x m_w.
/// Pole data: res[W, gamma_k] = e_k f_k^T.
class WeightFilter {
 public:
  WeightFilter() = default;
  WeightFilter(Mat Aw, Mat Bw, Mat Cw, Mat Dw);

  static WeightFilter identity(Eigen::Index m);
  static WeightFilter constant(const Mat& Dw);

  const Mat& A() const { return Aw_; }
  const Mat& B() const { return Bw_; }
  const Mat& C() const { return Cw_; }
  const Mat& D() const { return Dw_; }
  const Mat& Pw() const { return Pw_; }

  const CVec& gamma() const { return gamma_; }
  const CMat& e() const { return e_; }  // m x n_w
  const CMat& f() const { return f_; }  // m_w x n_w

  Eigen::Index order() const { return Aw_.rows(); }
  Eigen::Index m() const { return Dw_.rows(); }
  Eigen::Index mw() const { return Dw_.cols(); }

  CMat eval(cplx s) const;
  StateSpace as_state_space() const { return StateSpace(Aw_, Bw_, Cw_, Dw_); }

 private:
  Mat Aw_, Bw_, Cw_, Dw_, Pw_;
  CVec gamma_;
  CMat e_, f_;
};

/// Throws NotInWeightedH2 naming the failed clause.
void validate_membership(const StateSpace& G, const WeightFilter& W);

/// Cascade realization of F[G] with
///   A_F = [[A, B C_w], [0, A_w]]
///   B_F = [[Z C_w^T + B D_w D_w^T], [P_w C_w^T + B_w D_w^T]]
///   C_F = [C, D C_w]
/// where A_w P_w + P_w A_w^T + B_w B_w^T = 0 and
/// A Z + Z A_w^T + B (C_w P_w + D_w B_w^T) = 0.
struct FRealization {
  Mat A;    // n x n
  Mat BCw;  // n x n_w
  Mat Aw;   // n_w x n_w
  Mat BF;   // (n+n_w) x m
  Mat CF;   // p x (n+n_w)
  Mat Pw;
  Mat Z;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index nw() const { return Aw.rows(); }
  Eigen::Index order() const { return n() + nw(); }
  Mat A_F() const;
  StateSpace as_state_space() const;
};

FRealization build_f_realization(const StateSpace& G, const WeightFilter& W);

/// LU factors of sI - A_F split along the block-triangular structure.
class Resolvent {
 public:
  Resolvent(const FRealization& F, cplx s);
  CMat solve(const CMat& y) const;            // (sI - A_F)^{-1} y
  CMat solve_transpose(const CMat& y) const;  // (sI - A_F^T)^{-1} y

 private:
  const FRealization* F_;
  Eigen::PartialPivLU<CMat> lu_a_, lu_w_;
};

CMat eval_f(const FRealization& F, cplx s);
CMat eval_f_derivative(const FRealization& F, cplx s);
Mat f_impulse_at_zero(const FRealization& F);

/// G(s) W(s) as a cascade; feedthrough D D_w.
StateSpace cascade_with_weight(const StateSpace& G, const WeightFilter& W);

double weighted_h2_inner(const StateSpace& G, const StateSpace& H, const WeightFilter& W);
double weighted_h2_norm(const StateSpace& G, const WeightFilter& W);

struct ConstantInner {
  double full;    // <G, D_H>_W
  double f_side;  // <F[G], D_H>_H2
};
ConstantInner weighted_inner_with_constant(const StateSpace& G, const Mat& DH,
                                           const WeightFilter& W);

/// ||(G - G_r) W||_H2.
double weighted_error_norm(const StateSpace& G, const StateSpace& Gr, const WeightFilter& W);

struct QuadratureConfig {
  double omega_min = 1e-4;
  double omega_max = 1e4;
  int points = 4000;
  double rel_tol = 1e-5;
  int max_refinements = 5;
};

/// Frequency-domain evaluation of <G, H>_W, independent of the Gramian path.
double quadrature_weighted_inner(const StateSpace& G, const StateSpace& H,
                                 const WeightFilter& W, const QuadratureConfig& cfg = {});

}  // namespace mor
