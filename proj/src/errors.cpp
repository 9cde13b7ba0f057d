#include "streamstab/errors.hpp"

namespace streamstab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroQuaternion: return "ZeroQuaternion";
    case ErrorCode::NonUnitQuaternion: return "NonUnitQuaternion";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::NegativeMagnitude: return "NegativeMagnitude";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingConfidence: return "MissingConfidence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonPositiveDt: return "NonPositiveDt";
    case ErrorCode::NoValidPixels: return "NoValidPixels";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoOverlappingValidity: return "NoOverlappingValidity";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::UnsupportedMagic: return "UnsupportedMagic";
    case ErrorCode::MissingProperty: return "MissingProperty";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NonMonotonicTimestamps:
    case ErrorCode::UnsupportedMagic:
    case ErrorCode::MissingProperty:
    case ErrorCode::CountMismatch:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    std::optional<std::size_t> line) {
  std::string out = to_string(code);
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line)), code_(code), line_(line) {}

}  // namespace streamstab
