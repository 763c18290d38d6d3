#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amcp {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kEmptyMask,
  kInvalidMask,
  kNoPromptPoints,
  kPromptOutOfBounds,
  kInvalidK,
  kSceneMismatch,
  kBackendUnavailable,
  kProtocolError,
  kTimeout,
  kIoError,
  kConfigError,
  kReportWriteError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as amcp::Error; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool is_backend_failure() const noexcept {
    return code_ == ErrorCode::kBackendUnavailable ||
           code_ == ErrorCode::kProtocolError || code_ == ErrorCode::kTimeout;
  }

 private:
  ErrorCode code_;
};

}  // namespace amcp
