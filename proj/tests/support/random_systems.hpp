#pragma once

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "mor/fmap.hpp"

namespace mor::testing {

// Block-diagonal stable spectrum (real poles and conjugate pairs) hidden by a
// mildly conditioned similarity.
inline Mat random_stable_A(std::mt19937_64& rng, int n, double re_lo = 0.3, double re_hi = 3.0,
                           double im_hi = 3.0) {
  std::uniform_real_distribution<double> re(re_lo, re_hi), im(0.2, im_hi), u(-1.0, 1.0),
      coin(0.0, 1.0);
  Mat L = Mat::Zero(n, n);
  int i = 0;
  while (i < n) {
    if (i + 1 < n && coin(rng) < 0.5) {
      const double a = -re(rng), b = im(rng);
      L(i, i) = a;
      L(i + 1, i + 1) = a;
      L(i, i + 1) = b;
      L(i + 1, i) = -b;
      i += 2;
    } else {
      L(i, i) = -re(rng);
      ++i;
    }
  }
  Mat S = Mat::Identity(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) S(r, c) += 0.3 * u(rng);
  return S * L * S.inverse();
}

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat M(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = g(rng);
  return M;
}

inline StateSpace random_system(std::mt19937_64& rng, int n, int p, int m) {
  return StateSpace(random_stable_A(rng, n), random_matrix(rng, n, m), random_matrix(rng, p, n));
}

// Square weight of order nw with D_w = 0.
inline WeightFilter random_weight(std::mt19937_64& rng, int nw, int m) {
  return WeightFilter(random_stable_A(rng, nw), random_matrix(rng, nw, m),
                      random_matrix(rng, m, nw), Mat::Zero(m, m));
}

// Weight with a rank-deficient feedthrough: D_w = [I_{m-1} 0; 0 0] rotated.
// Returns the weight and a matrix K (m x 1) with K^T D_w = 0.
struct WeightWithKernel {
  WeightFilter W;
  Mat kernel;
};

inline WeightWithKernel random_weight_with_kernel(std::mt19937_64& rng, int nw, int m) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, m, m));
  const Mat Q = qr.householderQ();
  Mat Dw = Mat::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) Dw += Q.col(i) * Q.col(i).transpose();
  return {WeightFilter(random_stable_A(rng, nw), random_matrix(rng, nw, m),
                       random_matrix(rng, m, nw), Dw),
          Q.col(m - 1)};
}

// Diagonal weight: each channel sums `sections` second-order band-pass
// filters with centre frequencies spread over [lo, hi].
inline WeightFilter band_pass_weight(int m, int sections, double lo, double hi) {
  const int nw = 2 * sections * m;
  Mat Aw = Mat::Zero(nw, nw), Bw = Mat::Zero(nw, m), Cw = Mat::Zero(m, nw);
  int k = 0;
  for (int ch = 0; ch < m; ++ch) {
    for (int s = 0; s < sections; ++s) {
      const double w0 = sections == 1 ? std::sqrt(lo * hi)
                                      : lo * std::pow(hi / lo, double(s) / (sections - 1));
      const double zeta = 0.3;
      // x1' = x2, x2' = -w0^2 x1 - 2 zeta w0 x2 + u, y = 2 zeta w0 x2
      Aw(k, k + 1) = 1.0;
      Aw(k + 1, k) = -w0 * w0;
      Aw(k + 1, k + 1) = -2.0 * zeta * w0;
      Bw(k + 1, ch) = 1.0;
      Cw(ch, k + 1) = 2.0 * zeta * w0;
      k += 2;
    }
  }
  return WeightFilter(Aw, Bw, Cw, Mat::Zero(m, m));
}

}  // namespace mor::testing
