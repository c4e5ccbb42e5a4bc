#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eecal {

enum class ErrorKind {
  InvalidArgument,
  DegenerateGeometry,
  EmptyInput,
  EmptyCloud,
  InvalidDimensions,
  EEOutsideFrustum,
  NoValidCluster,
  TooFewPoints,
  TooFewKeypoints,
  NoCorrespondences,
  NoUsableFrames,
  MissingGroundTruth,
  Config,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::InvalidDimensions: return "InvalidDimensions";
    case ErrorKind::EEOutsideFrustum: return "EEOutsideFrustum";
    case ErrorKind::NoValidCluster: return "NoValidCluster";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::TooFewKeypoints: return "TooFewKeypoints";
    case ErrorKind::NoCorrespondences: return "NoCorrespondences";
    case ErrorKind::NoUsableFrames: return "NoUsableFrames";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eecal
