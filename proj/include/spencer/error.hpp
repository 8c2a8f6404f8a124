#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spencer {

enum class ErrorCode {
  JacobiViolated,
  KillingDegenerate,
  DimensionMismatch,
  DegreeMismatch,
  DegreeCapExceeded,
  DimensionCapExceeded,
  ResolutionTooSmall,
  DegreeOutOfRange,
  NonPositiveWeight,
  DegenerateLambda,
  DimensionUnsupported,
  ZeroCovector,
  NonConvergence,
  StepCollapse,
  EigensolverFailure,
  SolverFailure,
  ShapeMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spencer
