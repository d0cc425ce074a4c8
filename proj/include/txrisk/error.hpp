#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace txrisk {

/// Error classes raised by the library. Each maps to a distinct CLI exit code.
enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  KeyMismatch,
  OutOfRange,
  EmptyDataset,
  SchemaMismatch,
  TooFewPoints,
  EmptyMembers,
  MissingProfile,
  NoFeasibleScale,
  FarFromAllClusters,
  ZeroServices,
  ParseError,
  GapError,
  EmptyIntersection,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyMembers: return "EmptyMembers";
    case ErrorCode::MissingProfile: return "MissingProfile";
    case ErrorCode::NoFeasibleScale: return "NoFeasibleScale";
    case ErrorCode::FarFromAllClusters: return "FarFromAllClusters";
    case ErrorCode::ZeroServices: return "ZeroServices";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GapError: return "GapError";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace txrisk
