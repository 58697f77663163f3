#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lightray {

enum class ErrorCode {
  InvalidArgument,
  InvalidExtent,
  InvalidCount,
  DimensionMismatch,
  ZeroCleanData,
  ZeroOperator,
  ZeroDenominator,
  NegativeThreshold,
  KrylovBreakdown,
  NonFinite,
  UnsupportedNu,
  NonUnitVector,
  NotLightLike,
  Config,
  Io,
};

/// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Config, Numerical, Io };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return lightray::category(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace lightray
