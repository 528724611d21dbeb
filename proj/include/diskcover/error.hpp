#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diskcover {

enum class ErrorCode {
  InvalidArgument,
  ContractViolation,
  DimensionMismatch,
  EmptyMask,
  NonFinite,
  BadMagic,
  UnsupportedVariant,
  BadHeader,
  BadMaxval,
  Truncated,
  TrailingData,
  Schema,
  Io,
  Usage,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace diskcover
