#include "amcp/error.hpp"

namespace amcp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kInvalidMask: return "InvalidMask";
    case ErrorCode::kNoPromptPoints: return "NoPromptPoints";
    case ErrorCode::kPromptOutOfBounds: return "PromptOutOfBounds";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kSceneMismatch: return "SceneMismatch";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kReportWriteError: return "ReportWriteError";
  }
  return "Unknown";
}

}  // namespace amcp
