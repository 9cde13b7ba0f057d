#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace streamstab {

enum class ErrorCode {
  // Numerical preconditions.
  ZeroQuaternion,
  NonUnitQuaternion,
  InvalidGamma,
  InvalidRadius,
  EmptyImage,
  NegativeMagnitude,
  DimensionMismatch,
  EmptySet,
  EmptyList,
  LengthMismatch,
  MissingConfidence,
  ShapeMismatch,
  EmptyTrajectory,
  TooShort,
  NonPositiveDt,
  NoValidPixels,
  DegenerateConfiguration,
  NoOverlappingValidity,
  TooFewPoints,
  InvalidArgument,
  // Input / format problems.
  ParseError,
  NonMonotonicTimestamps,
  UnsupportedMagic,
  MissingProperty,
  CountMismatch,
  IoError,
};

const char* to_string(ErrorCode code);

/// True for codes caused by malformed input files rather than by numerical
/// preconditions. The CLI maps the two classes to different exit codes.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based line number for text parse failures.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace streamstab
