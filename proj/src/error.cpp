#include "drsafe/error.hpp"

namespace drsafe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EpsTooLarge: return "EpsTooLarge";
    case ErrorCode::WrongM: return "WrongM";
    case ErrorCode::QQTSingular: return "QQTSingular";
    case ErrorCode::ZeroRNorm: return "ZeroRNorm";
    case ErrorCode::RadiusMismatch: return "RadiusMismatch";
    case ErrorCode::InfeasibleProbe: return "InfeasibleProbe";
    case ErrorCode::AllProbesInfeasible: return "AllProbesInfeasible";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace drsafe
