#pragma once

#include <stdexcept>
#include <string>

namespace symprod {

enum class ErrorCode {
  NonSymmetric,
  BadLength,
  DimensionMismatch,
  TooLarge,
  Zero,
  ZeroScale,
  Ambiguous,
  Singular,
  InvalidCone,
  ClosedFormMismatch,
  TheoremViolation,
  PreconditionViolated,
  Schema,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Zero: return "Zero";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::InvalidCone: return "InvalidCone";
    case ErrorCode::ClosedFormMismatch: return "ClosedFormMismatch";
    case ErrorCode::TheoremViolation: return "TheoremViolation";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace symprod
