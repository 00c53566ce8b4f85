#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dash {

enum class ErrorCode {
  // ledger
  MalformedTransaction,
  UnknownSender,
  NonceMismatch,
  EmptyMempool,
  NotFound,
  Unserializable,
  Corrupt,
  // runtime
  DuplicateLabel,
  UnknownContractType,
  OutOfGas,
  NotAContract,
  UnknownFunction,
  Reverted,
  // contracts / service
  Unauthorized,
  DuplicatePatient,
  InvalidArgument,
  // pubsub
  InvalidFilter,
  UnknownSubscriber,
  UnknownSubscription,
  OutOfOrderDispatch,
  // records
  SchemaViolation,
  BackendUnavailable,
  IntegrityMismatch,
};

std::string_view toString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(toString(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail = {}) { throw Error(code, detail); }

}  // namespace dash
