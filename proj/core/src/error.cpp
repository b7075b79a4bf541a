#include "ipi/error.hpp"

namespace ipi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kInsufficientExcitation: return "insufficient-excitation";
    case ErrorCode::kIdentifierDegraded: return "identifier-degraded";
    case ErrorCode::kPolicyImprovement: return "policy-improvement";
    case ErrorCode::kOracleFailure: return "oracle-failure";
    case ErrorCode::kEvaluationDiverges: return "evaluation-diverges";
    case ErrorCode::kBoundUndefined: return "bound-undefined";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kInput: return "input";
    case ErrorCode::kMissingBundle: return "missing-bundle";
    case ErrorCode::kIncompatibleBundle: return "incompatible-bundle";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ipi
