#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigrev {

enum class ErrorCode {
  NegativeMass,
  SumNotOne,
  DimensionMismatch,
  InvalidGrid,
  InvalidH,
  InvalidParams,
  TooManyLevels,
  ZeroMassSignal,
  IncompatibleShapes,
  ShapeMismatch,
  InvalidMechanism,
  InvalidDomain,
  WrongInstanceShape,
  SizeCapExceeded,
  SolverFailure,
  WrongMode,
  NegativeWeights,
  InvalidEps,
  TooManyBidders,
  UnknownExperiment,
  InvalidConfig,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidH: return "InvalidH";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::ZeroMassSignal: return "ZeroMassSignal";
    case ErrorCode::IncompatibleShapes: return "IncompatibleShapes";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidMechanism: return "InvalidMechanism";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::WrongInstanceShape: return "WrongInstanceShape";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::WrongMode: return "WrongMode";
    case ErrorCode::NegativeWeights: return "NegativeWeights";
    case ErrorCode::InvalidEps: return "InvalidEps";
    case ErrorCode::TooManyBidders: return "TooManyBidders";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sigrev
