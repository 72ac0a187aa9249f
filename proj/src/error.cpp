#include "fvq/error.hpp"

namespace fvq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedFrame: return "TruncatedFrame";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewEntries: return "TooFewEntries";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FeatureNameMismatch: return "FeatureNameMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fvq
