#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace witness_forge {

enum class ErrorCode {
  InvalidArgument,
  ImaginaryResidual,
  CutoffTooSmall,
  DegenerateNorm,
  ModelMismatch,
  QuadratureNotConverged,
  DegenerateWeights,
  NotConverged,
  NotCollinear,
  NoRealRoot,
  ZeroEfficiency,
  NonpositiveScale,
  NoSignChange,
  InvalidCovariance,
  SchemaError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace witness_forge
