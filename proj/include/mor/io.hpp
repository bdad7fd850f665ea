#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mor/fmap.hpp"

namespace mor::io {

/// Reads real/integer Matrix Market data in array or coordinate layout
/// (general or symmetric). ParseError messages carry line and column.
Mat read_matrix_market(const std::filesystem::path& path);
Mat parse_matrix_market(const std::string& text, const std::string& source = "<string>");

/// Array layout, %.17g, written to a temporary and renamed into place.
void write_matrix_market(const std::filesystem::path& path, const Mat& M);

/// Writes text atomically (temporary file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

struct SystemManifest {
  std::string name;
  std::map<std::string, std::filesystem::path> files;  // key -> resolved path
  std::string format = "matrix-market";
  std::string units;
  std::string description;
};

SystemManifest parse_manifest(const std::filesystem::path& path);

struct LoadedProblem {
  SystemManifest manifest;
  StateSpace system;
  WeightFilter weight;
};

/// Loads and validates system and weight. Missing D and D_w default to zero;
/// no weight keys at all means W = I.
LoadedProblem load_manifest(const std::filesystem::path& path);

/// Reads model.{A,B,C,D}.mtx from a directory written by `mor reduce`.
StateSpace load_model_dir(const std::filesystem::path& dir);
void write_model_dir(const std::filesystem::path& dir, const StateSpace& sys);

}  // namespace mor::io
