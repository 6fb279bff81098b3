#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recmix {

enum class ErrorCode {
  kNotPsd,
  kEmptySample,
  kTooFewSamples,
  kDimensionMismatch,
  kDomainError,
  kPoissonOverflow,
  kSingularHessian,
  kNoConvergence,
  kMissingColumn,
  kUnparseableRow,
  kIoError,
  kConfigError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the harness, the CLI) can map it to a replication outcome or an
// exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace recmix
