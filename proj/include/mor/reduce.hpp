#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mor/optimality.hpp"

namespace mor {

/// Where a projection column came from.
struct ColumnSource {
  enum class Kind { RealShift, RealPart, ImagPart, RangeZ };
  Kind kind;
  cplx shift;  // unused for RangeZ
};

struct ProjectionPair {
  Mat V;  // n x r
  Mat W;  // n x r, W^T V = I
  std::vector<ColumnSource> provenance;
};

enum class InitStrategy { MirroredDominant, LogSpaced, Random };

struct NowiConfig {
  int order = 1;
  double tol = 1e-4;
  int max_iter = 100;
  InitStrategy init = InitStrategy::MirroredDominant;
  std::uint64_t seed = 0;
  // Include Ran(Z) in the projection space. Unset means "on when n_w <= n".
  std::optional<bool> exactness;
  bool stability_repair = true;
  bool feedthrough_each_iteration = true;
  int weight_poles = 2;  // nu for the mirrored-dominant start
};

struct IterationRecord {
  int iteration = 0;
  std::vector<cplx> shifts;  // shifts used to build this iterate
  double shift_change = 0.0;
  bool stable = false;
  double max_interpolatory_rel = 0.0;  // NaN when not evaluable
};

struct ReducedModel {
  std::string method;
  StateSpace system;
  Mat Zr;
  ProjectionPair projection;
  ResidualReport diagnostics;
  bool has_diagnostics = false;
  std::vector<IterationRecord> history;
  InterpolationData data;  // shifts and directions that built the model
  int requested_order = 0;
  int iterations = 0;
  bool converged = false;
  bool max_iter_reached = false;
  bool stable = false;
  bool exactness = false;
  bool shift_perturbed = false;
  bool feedthrough_regularized = false;
  Vec hankel;  // fwbt only

  int order() const { return static_cast<int>(system.order()); }
};

/// Columns (sigma_i I - A_F)^{-1} B_F b_i and (sigma_i I - A_F^T)^{-1} C_F^T c_i.
std::pair<CMat, CMat> build_subspaces(const FRealization& F, const InterpolationData& data);

/// Leading n rows, realified, optionally augmented by extra (real) columns in
/// both spaces, then biorthonormalized.
ProjectionPair extract_projection(const CMat& Vraw, const CMat& Wraw, Eigen::Index n,
                                  const CVec& shifts, const Mat& extra = Mat());

struct Feedthrough {
  Mat Dr;
  Mat Zr;
  bool regularized = false;
};

/// Z_r from A_r Z_r + Z_r A_w^T + B_r (C_w P_w + D_w B_w^T) = 0 and
/// D_r = C (Z - V_r Z_r) C_w^T N (N^T C_w P_w C_w^T N)^+ N^T.
/// G is taken with zero feedthrough.
Feedthrough compute_feedthrough(const StateSpace& G, const WeightFilter& W,
                                const FRealization& F, const ProjectionPair& proj,
                                const Mat& Ar, const Mat& Br);

InterpolationData initial_data(const StateSpace& G, const WeightFilter& W,
                               const NowiConfig& cfg);

ReducedModel nowi(const StateSpace& G, const WeightFilter& W, const NowiConfig& cfg,
                  const std::optional<InterpolationData>& init = std::nullopt);

struct InterpolationGap {
  CVec right;   // p
  CVec left;    // m
  cplx bitangential;
};

InterpolationGap interpolation_gap(const StateSpace& G, const WeightFilter& W,
                                   const ReducedModel& model, cplx sigma, const CVec& b,
                                   const CVec& c);

ReducedModel fwbt(const StateSpace& G, const WeightFilter& W, int order);

/// max_i |sigma_new_i - sigma_old_i| / |sigma_old_i| after sorting both by (re, im).
double shift_change(const CVec& old_shifts, const CVec& new_shifts);

}  // namespace mor
