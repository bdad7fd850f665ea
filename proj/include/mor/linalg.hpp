#pragma once

#include <utility>

#include "mor/error.hpp"
#include "mor/types.hpp"

namespace mor::linalg {

// Solves A P + P A^T + Q = 0 for stable A. The result is symmetrized.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

// Solves M1 X + X M2 + N = 0 by Schur reduction of M1 and M2.
Mat solve_sylvester(const Mat& M1, const Mat& M2, const Mat& N);
CMat solve_sylvester(const CMat& M1, const CMat& M2, const CMat& N);

// Brute-force vectorized solve, kept as an independent reference for the
// Schur-based solver. Limited to order(M1)*order(M2) <= 400.
Mat kron_oracle_sylvester(const Mat& M1, const Mat& M2, const Mat& N);

struct SpectralDecomposition {
  CVec eigenvalues;  // sorted by (real, imag)
  CMat R;            // unit-norm right eigenvectors, column k pairs with eigenvalue k
};

SpectralDecomposition spectral(const Mat& A, double cond_limit = 1e12);

// Orthonormal basis of the numerical null space of M (columns). Singular
// values below rank_tol * sigma_max * max(rows, cols) count as zero.
Mat kernel_basis(const Mat& M, double rank_tol = 1e-10);

// Orthonormal basis for the column span, modified Gram-Schmidt with
// reorthogonalization. Columns whose remainder is below drop_tol relative to
// their original norm are discarded.
Mat orth(const Mat& V, double drop_tol = 1e-10);

// Returns (V_r, W_r) spanning the inputs with W_r^T V_r = I.
std::pair<Mat, Mat> biorthonormalize(const Mat& Vraw, const Mat& Wraw,
                                     double cond_limit = 1e12);

double cond2(const Mat& M);
double max_real_part(const Mat& A);

}  // namespace mor::linalg
