// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/error.hpp"

namespace fairdistill {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::NonFiniteNumeric: return "NonFiniteNumeric";
    case ErrorCode::NumericOutOfRange: return "NumericOutOfRange";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteActivation: return "NonFiniteActivation";
    case ErrorCode::StaleTape: return "StaleTape";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::CheckpointFormat: return "CheckpointFormat";
    case ErrorCode::BatchTooSmall: return "BatchTooSmall";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::TeacherNotFrozen: return "TeacherNotFrozen";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LatentDimMismatch: return "LatentDimMismatch";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::TooFewRealPoints: return "TooFewRealPoints";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
    case ErrorCode::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace fairdistill
