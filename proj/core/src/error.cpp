#include "lightray/error.hpp"

namespace lightray {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidExtent: return "invalid-extent";
    case ErrorCode::InvalidCount: return "invalid-count";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::ZeroCleanData: return "zero-clean-data";
    case ErrorCode::ZeroOperator: return "zero-operator";
    case ErrorCode::ZeroDenominator: return "zero-denominator";
    case ErrorCode::NegativeThreshold: return "negative-threshold";
    case ErrorCode::KrylovBreakdown: return "krylov-breakdown";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::UnsupportedNu: return "unsupported-nu";
    case ErrorCode::NonUnitVector: return "non-unit-vector";
    case ErrorCode::NotLightLike: return "not-light-like";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroOperator:
    case ErrorCode::ZeroDenominator:
    case ErrorCode::KrylovBreakdown:
    case ErrorCode::NonFinite:
    case ErrorCode::ZeroCleanData:
      return ErrorCategory::Numerical;
    case ErrorCode::Io:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Config;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace lightray
