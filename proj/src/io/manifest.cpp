#include <fstream>
#include <set>
#include <sstream>

#include "mor/io.hpp"

namespace mor::io {
namespace {

const std::set<std::string> kMatrixKeys = {"A", "B", "C", "D", "A_w", "B_w", "C_w", "D_w"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string dims(const Mat& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

[[noreturn]] void mismatch(const std::string& a, const Mat& Ma, const std::string& b,
                           const Mat& Mb) {
  fail(ErrorKind::DimensionMismatch,
       a + " (" + dims(Ma) + ") is inconsistent with " + b + " (" + dims(Mb) + ")");
}

}  // namespace

SystemManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, path.string() + ": cannot open manifest");
  const std::filesystem::path base = path.parent_path();
  SystemManifest m;
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::ParseError,
           path.string() + ":" + std::to_string(lineno) + ":1: expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string where = path.string() + ":" + std::to_string(lineno) + ":1: ";
    if (!seen.insert(key).second) fail(ErrorKind::ParseError, where + "duplicate key '" + key + "'");
    if (kMatrixKeys.count(key)) {
      if (value.empty()) fail(ErrorKind::ParseError, where + "empty path for '" + key + "'");
      std::filesystem::path p(value);
      m.files[key] = p.is_absolute() ? p : base / p;
    } else if (key == "name") {
      m.name = value;
    } else if (key == "format") {
      if (value != "matrix-market" && value != "mtx") {
        fail(ErrorKind::ParseError, where + "unsupported format '" + value + "'");
      }
      m.format = value;
    } else if (key == "units") {
      m.units = value;
    } else if (key == "description") {
      m.description = value;
    } else {
      fail(ErrorKind::ParseError, where + "unknown key '" + key + "'");
    }
  }
  for (const char* k : {"A", "B", "C"}) {
    if (!m.files.count(k)) {
      fail(ErrorKind::ParseError, path.string() + ": missing required key '" + k + "'");
    }
  }
  return m;
}

LoadedProblem load_manifest(const std::filesystem::path& path) {
  SystemManifest m = parse_manifest(path);
  auto load = [&](const std::string& key) { return read_matrix_market(m.files.at(key)); };
  const Mat A = load("A"), B = load("B"), C = load("C");
  if (A.rows() != A.cols()) mismatch("A", A, "A", A);
  if (B.rows() != A.rows()) mismatch("B", B, "A", A);
  if (C.cols() != A.rows()) mismatch("C", C, "A", A);
  Mat D = m.files.count("D") ? load("D") : Mat::Zero(C.rows(), B.cols());
  if (D.rows() != C.rows() || D.cols() != B.cols()) mismatch("D", D, "B/C", B);
  StateSpace sys(A, B, C, D);

  const Eigen::Index mi = B.cols();
  const bool any_w = m.files.count("A_w") || m.files.count("B_w") || m.files.count("C_w") ||
                     m.files.count("D_w");
  WeightFilter W;
  if (!any_w) {
    W = WeightFilter::identity(mi);
  } else if (!m.files.count("A_w")) {
    if (m.files.count("B_w") || m.files.count("C_w")) {
      fail(ErrorKind::ParseError, path.string() + ": B_w/C_w given without A_w");
    }
    const Mat Dw = load("D_w");
    if (Dw.rows() != mi) mismatch("D_w", Dw, "B", B);
    W = WeightFilter::constant(Dw);
  } else {
    for (const char* k : {"B_w", "C_w"}) {
      if (!m.files.count(k)) {
        fail(ErrorKind::ParseError, path.string() + ": A_w given without " + k);
      }
    }
    const Mat Aw = load("A_w"), Bw = load("B_w"), Cw = load("C_w");
    if (Aw.rows() != Aw.cols()) mismatch("A_w", Aw, "A_w", Aw);
    if (Bw.rows() != Aw.rows()) mismatch("B_w", Bw, "A_w", Aw);
    if (Cw.cols() != Aw.rows()) mismatch("C_w", Cw, "A_w", Aw);
    if (Cw.rows() != mi) mismatch("C_w", Cw, "B", B);
    Mat Dw = m.files.count("D_w") ? load("D_w") : Mat::Zero(mi, Bw.cols());
    if (Dw.rows() != mi || Dw.cols() != Bw.cols()) mismatch("D_w", Dw, "B_w", Bw);
    W = WeightFilter(Aw, Bw, Cw, Dw);
  }
  validate_membership(sys, W);
  return {std::move(m), std::move(sys), std::move(W)};
}

StateSpace load_model_dir(const std::filesystem::path& dir) {
  const Mat A = read_matrix_market(dir / "model.A.mtx");
  const Mat B = read_matrix_market(dir / "model.B.mtx");
  const Mat C = read_matrix_market(dir / "model.C.mtx");
  const Mat D = read_matrix_market(dir / "model.D.mtx");
  if (B.rows() != A.rows()) mismatch("model.B", B, "model.A", A);
  if (C.cols() != A.rows()) mismatch("model.C", C, "model.A", A);
  return StateSpace(A, B, C, D);
}

void write_model_dir(const std::filesystem::path& dir, const StateSpace& sys) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "model.A.mtx", sys.A());
  write_matrix_market(dir / "model.B.mtx", sys.B());
  write_matrix_market(dir / "model.C.mtx", sys.C());
  write_matrix_market(dir / "model.D.mtx", sys.D());
}

}  // namespace mor::io
