#pragma once

#include <stdexcept>
#include <string>

namespace snail {

enum class ErrorKind {
  NoMinimum,
  CutoffTooSmall,
  DegenerateLevels,
  NearResonantDenominator,
  DegenerateSubspace,
  LabelingFailed,
  StepRejection,
  NoCrossing,
  AmplitudeOutOfRange,
  CalibrationDiverged,
  NotFsimLike,
  FitFailed,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoMinimum: return "NoMinimum";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::DegenerateLevels: return "DegenerateLevels";
    case ErrorKind::NearResonantDenominator: return "NearResonantDenominator";
    case ErrorKind::DegenerateSubspace: return "DegenerateSubspace";
    case ErrorKind::LabelingFailed: return "LabelingFailed";
    case ErrorKind::StepRejection: return "StepRejection";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::AmplitudeOutOfRange: return "AmplitudeOutOfRange";
    case ErrorKind::CalibrationDiverged: return "CalibrationDiverged";
    case ErrorKind::NotFsimLike: return "NotFsimLike";
    case ErrorKind::FitFailed: return "FitFailed";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

}  // namespace snail
