// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairdistill {

enum class ErrorCode {
  // data
  MissingColumn,
  UnknownCategory,
  NonFiniteNumeric,
  NumericOutOfRange,
  EmptyFile,
  MalformedCsv,
  InvalidSchema,
  TooFewRows,
  WidthMismatch,
  // nn
  ShapeMismatch,
  NonFiniteActivation,
  StaleTape,
  NonFiniteGradient,
  CheckpointFormat,
  // training
  BatchTooSmall,
  NonFiniteLoss,
  TeacherNotFrozen,
  InvalidConfig,
  // generation
  LatentDimMismatch,
  SchemaMismatch,
  IoError,
  // evaluation
  SingleGroup,
  TooFewRealPoints,
  InvalidArgument,
  // pipeline
  ConfigError,
  ManifestMismatch,
  StageFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// The single exception type thrown by the library. The code identifies the
/// failure class; the message carries the specifics (column, row, epoch...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairdistill
