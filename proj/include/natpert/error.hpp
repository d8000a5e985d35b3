#pragma once

#include <stdexcept>
#include <string>

namespace natpert {

enum class ErrorCode {
  Io,
  Parse,
  PageNotFound,
  Network,
  CacheCorrupt,
  MalformedDump,
  InsufficientHistory,
  EmptyResult,
  MissingPrediction,
  DegenerateInput,
  MissingResource,
  EmptyInput,
  MalformedResource,
  DivisionByZero,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::PageNotFound: return "PageNotFound";
    case ErrorCode::Network: return "Network";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::MalformedDump: return "MalformedDump";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::MissingResource: return "MissingResource";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedResource: return "MalformedResource";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace natpert
