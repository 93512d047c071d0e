#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpump {

enum class ErrorCode {
  NotHermitian,
  DimMismatch,
  DimOverflow,
  InvalidParams,
  DegenerateDetuning,
  SignMismatch,
  StepTooLarge,
  NumericalHealth,
  ModelMismatch,
  UnknownPreset,
  Config,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::DimOverflow: return "DimOverflow";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateDetuning: return "DegenerateDetuning";
    case ErrorCode::SignMismatch: return "SignMismatch";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NumericalHealth: return "NumericalHealth";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qpump
