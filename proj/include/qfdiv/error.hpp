#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfdiv {

enum class ErrorCode {
  NonHermitianInput,
  NotUnitary,
  InvalidState,
  DimensionMismatch,
  LengthMismatch,
  InvalidRank,
  InvalidArgument,
  DomainViolation,
  UnknownFunction,
  AlphaOutOfOperatorConvexRange,
  MeasureUnavailable,
  SingularSigma,
  QuadratureNotConverged,
  DimensionTooLargeForBruteForce,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::AlphaOutOfOperatorConvexRange: return "AlphaOutOfOperatorConvexRange";
    case ErrorCode::MeasureUnavailable: return "MeasureUnavailable";
    case ErrorCode::SingularSigma: return "SingularSigma";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::DimensionTooLargeForBruteForce: return "DimensionTooLargeForBruteForce";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qfdiv
