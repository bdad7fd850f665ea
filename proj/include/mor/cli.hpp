#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mor/reduce.hpp"

namespace mor::cli {

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

/// "MIN:MAX:POINTS". MIN > 0 gives a log-spaced grid, MIN = 0 a linear one.
GridSpec parse_grid(const std::string& text);
std::vector<double> grid_points(const GridSpec& g);

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<std::string> methods{"nowi"};
  std::vector<int> orders;
  NowiConfig nowi;
  std::filesystem::path out = ".";
  std::optional<GridSpec> grid;
  std::optional<std::filesystem::path> model_dir;
  int threads = 1;
};

void cmd_reduce(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_residuals(const RunConfig& cfg);
void cmd_sample(const RunConfig& cfg);

/// 2 usage, 3 data, 4 numerical.
int exit_code(ErrorKind kind);

/// Default frequency grid spanning the spectra of system and weight.
std::vector<double> default_grid(const StateSpace& G, const WeightFilter& W);

/// max over omega of sigma_max(X(i w) W(i w)).
double weighted_hinf_sampled(const StateSpace& X, const WeightFilter& W,
                             const std::vector<double>& omega);

}  // namespace mor::cli
