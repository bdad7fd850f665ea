#pragma once

#include <string>
#include <vector>

#include "mor/fmap.hpp"

namespace mor {

/// Interpolation points with tangent directions. Column i of b and c pairs
/// with shifts(i).
struct InterpolationData {
  CVec shifts;
  CMat b;  // m x r
  CMat c;  // p x r
};

struct ResidualReport {
  CVec poles;  // reduced poles; conditions are taken at -poles

  std::vector<double> right_abs, right_rel;
  std::vector<double> left_abs, left_rel;
  std::vector<double> bitangential_abs, bitangential_rel;
  double kernel_abs = 0.0;
  double kernel_rel = 0.0;
  // Set when a normalizer vanished and the absolute value was reported instead.
  bool absolute_fallback = false;

  double rho_a = 0.0, rho_b = 0.0, rho_c = 0.0, rho_d = 0.0;
  double rho_a_rel = 0.0, rho_b_rel = 0.0, rho_c_rel = 0.0, rho_d_rel = 0.0;

  double max_right_rel() const;
  double max_left_rel() const;
  double max_bitangential_rel() const;
  double max_interpolatory_rel() const;
  double max_halevi_rel() const;
};

struct HaleviSolution {
  Mat X;   // (n+n_w) x n_r
  Mat Pr;  // n_r x n_r
  Mat Qr;  // n_r x n_r
  Mat Y;   // (n+n_w) x n_r
};

ResidualReport interpolatory_residuals(const StateSpace& G, const StateSpace& Gr,
                                       const WeightFilter& W);

HaleviSolution solve_halevi_system(const StateSpace& G, const StateSpace& Gr,
                                   const WeightFilter& W);

/// Fills the Halevi fields of a fresh report.
ResidualReport halevi_residuals(const StateSpace& G, const StateSpace& Gr,
                                const WeightFilter& W);

/// Both families in one report.
ResidualReport residual_report(const StateSpace& G, const StateSpace& Gr,
                               const WeightFilter& W);

struct EquivalenceResult {
  bool consistent = false;
  bool interpolatory_satisfied = false;
  bool halevi_satisfied = false;
  ResidualReport report;
};

EquivalenceResult equivalence_check(const StateSpace& G, const StateSpace& Gr,
                                    const WeightFilter& W, double tol = 1e-6,
                                    double scale_factor = 10.0);

/// Kernel basis of D_w^T used by the constant-term conditions.
Mat weight_kernel(const WeightFilter& W, double rank_tol = 1e-10);

}  // namespace mor
