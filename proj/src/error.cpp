#include "witness_forge/error.hpp"

namespace witness_forge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ImaginaryResidual: return "ImaginaryResidual";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::DegenerateNorm: return "DegenerateNorm";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NotCollinear: return "NotCollinear";
    case ErrorCode::NoRealRoot: return "NoRealRoot";
    case ErrorCode::ZeroEfficiency: return "ZeroEfficiency";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::InvalidCovariance: return "InvalidCovariance";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace witness_forge
