#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "mor/io.hpp"

namespace mor::io {
namespace {

struct Token {
  std::string text;
  int line;
  int column;
};

[[noreturn]] void parse_fail(const std::string& source, int line, int column,
                             const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ":" << column << ": " << what;
  fail(ErrorKind::ParseError, os.str());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<Token> split(const std::string& line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), lineno, static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

double to_double(const Token& t, const std::string& source) {
  const char* begin = t.text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') parse_fail(source, t.line, t.column, "expected a number, got '" + t.text + "'");
  if (errno == ERANGE && std::abs(v) > 1.0) parse_fail(source, t.line, t.column, "number out of range");
  if (!std::isfinite(v)) parse_fail(source, t.line, t.column, "non-finite entry");
  return v;
}

long to_index(const Token& t, const std::string& source) {
  const char* begin = t.text.c_str();
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || v < 0) {
    parse_fail(source, t.line, t.column, "expected a nonnegative integer, got '" + t.text + "'");
  }
  return v;
}

}  // namespace

Mat parse_matrix_market(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_fail(source, 1, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, lineno);
  if (header.size() < 5 || lower(header[0].text) != "%%matrixmarket") {
    parse_fail(source, 1, 1, "missing %%MatrixMarket header");
  }
  if (lower(header[1].text) != "matrix") {
    parse_fail(source, 1, header[1].column, "only 'matrix' objects are supported");
  }
  const std::string layout = lower(header[2].text);
  const std::string field = lower(header[3].text);
  const std::string symmetry = lower(header[4].text);
  if (layout != "array" && layout != "coordinate") {
    parse_fail(source, 1, header[2].column, "unknown layout '" + header[2].text + "'");
  }
  if (field != "real" && field != "integer" && field != "double") {
    parse_fail(source, 1, header[3].column, "unsupported field '" + header[3].text + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    parse_fail(source, 1, header[4].column, "unsupported symmetry '" + header[4].text + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  std::vector<Token> tokens;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '%') continue;
    for (auto& t : split(line, lineno)) tokens.push_back(std::move(t));
  }
  std::size_t pos = 0;
  auto next = [&](const char* what) -> const Token& {
    if (pos >= tokens.size()) parse_fail(source, lineno + 1, 1, std::string("unexpected end of file, expected ") + what);
    return tokens[pos++];
  };

  const long rows = to_index(next("row count"), source);
  const long cols = to_index(next("column count"), source);
  if (symmetric && rows != cols) {
    parse_fail(source, tokens[0].line, tokens[0].column, "symmetric matrix must be square");
  }
  Mat M = Mat::Zero(rows, cols);
  if (layout == "array") {
    for (long j = 0; j < cols; ++j) {
      for (long i = symmetric ? j : 0; i < rows; ++i) {
        const double v = to_double(next("matrix entry"), source);
        M(i, j) = v;
        if (symmetric) M(j, i) = v;
      }
    }
  } else {
    const long nnz = to_index(next("entry count"), source);
    for (long k = 0; k < nnz; ++k) {
      const Token& ti = next("row index");
      const Token& tj = next("column index");
      const long i = to_index(ti, source), j = to_index(tj, source);
      if (i < 1 || i > rows) parse_fail(source, ti.line, ti.column, "row index out of range");
      if (j < 1 || j > cols) parse_fail(source, tj.line, tj.column, "column index out of range");
      const double v = to_double(next("entry value"), source);
      M(i - 1, j - 1) += v;
      if (symmetric && i != j) M(j - 1, i - 1) += v;
    }
  }
  if (pos != tokens.size()) {
    parse_fail(source, tokens[pos].line, tokens[pos].column, "trailing data after matrix entries");
  }
  return M;
}

Mat read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix_market(ss.str(), path.string());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::ParseError, tmp.string() + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) fail(ErrorKind::ParseError, tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_matrix_market(const std::filesystem::path& path, const Mat& M) {
  std::string text = "%%MatrixMarket matrix array real general\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%ld %ld\n", static_cast<long>(M.rows()),
                static_cast<long>(M.cols()));
  text += buf;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", M(i, j));
      text += buf;
    }
  }
  write_text_atomic(path, text);
}

}  // namespace mor::io
