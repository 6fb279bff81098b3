#include "recmix/errors.h"

namespace recmix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPsd: return "NotPsd";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kPoissonOverflow: return "PoissonOverflow";
    case ErrorCode::kSingularHessian: return "SingularHessian";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnparseableRow: return "UnparseableRow";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace recmix
