#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fvq {

enum class ErrorCode {
  MalformedHeader,
  TruncatedFrame,
  UnsupportedFormat,
  SizeMismatch,
  DimensionMismatch,
  NonPositiveSigma,
  FrameTooSmall,
  TooFewFrames,
  TooFewSamples,
  DegenerateSamples,
  TooFewRows,
  NonFiniteLoss,
  VersionMismatch,
  CorruptModel,
  ZeroVariance,
  LengthMismatch,
  TooFewEntries,
  ConfigError,
  FeatureNameMismatch,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() is stable,
// what() carries context such as a file name or manifest line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fvq
