#pragma once

#include <vector>

#include "mor/error.hpp"
#include "mor/types.hpp"

namespace mor {

/// Continuous-time realization G(s) = C (sI - A)^{-1} B + D.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(Mat A, Mat B, Mat C, Mat D);
  /// D defaults to zero.
  StateSpace(Mat A, Mat B, Mat C);

  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }
  const Mat& C() const { return C_; }
  const Mat& D() const { return D_; }

  Eigen::Index order() const { return A_.rows(); }
  Eigen::Index inputs() const { return B_.cols(); }
  Eigen::Index outputs() const { return C_.rows(); }

  StateSpace with_D(Mat D) const { return StateSpace(A_, B_, C_, std::move(D)); }

 private:
  Mat A_, B_, C_, D_;
};

/// Simple-pole expansion sum_k c_k b_k^T / (s - lambda_k) + D.
struct PoleResidue {
  CVec poles;
  CMat b;  // m x n, column k is b_k
  CMat c;  // p x n, column k is c_k
  Mat D;

  CMat evaluate(cplx s) const;
};

CMat eval_transfer(const StateSpace& sys, cplx s);
PoleResidue to_pole_residue(const StateSpace& sys);
bool is_stable(const StateSpace& sys, double stability_margin = 0.0);
bool is_stable(const Mat& A, double stability_margin = 0.0);

double h2_inner(const StateSpace& G, const StateSpace& H);
double h2_norm(const StateSpace& G);

/// Max over the grid of sigma_max(G(i w)). A lower bound for the H-infinity norm.
double hinf_norm_sampled(const StateSpace& sys, const std::vector<double>& omega);

std::vector<double> logspace(double lo, double hi, int points);

/// Realization of G(s) - H(s).
StateSpace difference(const StateSpace& G, const StateSpace& H);

}  // namespace mor
