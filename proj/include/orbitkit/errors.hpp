#pragma once

#include <stdexcept>
#include <string>

namespace orbitkit {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  SingularInput,
  DegenerateProjection,
  NotComplexSymmetric,
  NotSkewSymmetric,
  CutLocus,
  NotTangent,
  OutsideTube,
  ShapeMismatch,
  RankGapViolation,
  NonPositiveDensity,
  PriorInvalid,
  DomainError,
  NoConvergence,
  AntipodalData,
  TooFewSamples,
  SingularTau,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::NotComplexSymmetric: return "NotComplexSymmetric";
    case ErrorCode::NotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorCode::CutLocus: return "CutLocus";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::OutsideTube: return "OutsideTube";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RankGapViolation: return "RankGapViolation";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::PriorInvalid: return "PriorInvalid";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AntipodalData: return "AntipodalData";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingularTau: return "SingularTau";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library error with a machine-readable code and a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace orbitkit
