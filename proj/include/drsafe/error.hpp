#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drsafe {

enum class ErrorCode {
  DimensionMismatch,
  NotPD,
  EmptyInput,
  InvalidConfig,
  EpsTooLarge,
  WrongM,
  QQTSingular,
  ZeroRNorm,
  RadiusMismatch,
  InfeasibleProbe,
  AllProbesInfeasible,
  NoPairs,
  ConfigError,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace drsafe
