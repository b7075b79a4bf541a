#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipi {

enum class ErrorCode {
  kConfiguration,
  kInsufficientExcitation,
  kIdentifierDegraded,
  kPolicyImprovement,
  kOracleFailure,
  kEvaluationDiverges,
  kBoundUndefined,
  kPrecondition,
  kInput,
  kMissingBundle,
  kIncompatibleBundle,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace ipi
