#include "spencer/error.hpp"

namespace spencer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::JacobiViolated: return "JacobiViolated";
    case ErrorCode::KillingDegenerate: return "KillingDegenerate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DegenerateLambda: return "DegenerateLambda";
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::ZeroCovector: return "ZeroCovector";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace spencer
