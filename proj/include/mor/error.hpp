#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mor {

enum class ErrorKind {
  NonStableMatrix,
  DimensionMismatch,
  SingularOperator,
  SizeLimitExceeded,
  DefectiveMatrix,
  RankDeficient,
  PoleHit,
  NonStableSystem,
  InfiniteNorm,
  NotInWeightedH2,
  NonConvergedQuadrature,
  MaxIterationsExceeded,
  UnstableReducedModel,
  ParseError,
  UsageError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace mor
