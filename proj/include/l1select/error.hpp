#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l1select {

enum class ErrorCode {
  SupportMismatch,
  InvalidPair,
  EmptyFamily,
  IndexOutOfRange,
  NotNormalized,
  DegeneratePair,
  FamilySize,
  ParameterOutOfRange,
  Capacity,
  Parse,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SupportMismatch: return "support-mismatch";
    case ErrorCode::InvalidPair: return "invalid-pair";
    case ErrorCode::EmptyFamily: return "empty-family";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::NotNormalized: return "not-normalized";
    case ErrorCode::DegeneratePair: return "degenerate-pair";
    case ErrorCode::FamilySize: return "family-size";
    case ErrorCode::ParameterOutOfRange: return "parameter-out-of-range";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace l1select
