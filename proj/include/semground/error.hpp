#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semground {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MalformedFile,
  Io,
  // parser
  NoActionFound,
  NoObjectFound,
  ConflictingActions,
  TransportError,
  MalformedResponse,
  UnsupportedAction,
  FixtureMiss,
  // grounding
  UnknownAttribute,
  AmbiguousAttribute,
  NoDetections,
  // spec generation
  UnsupportedOperation,
  RegionKindMismatch,
};

std::string_view to_string(ErrorCode code);

/// Typed error carried through every stage. The CLI maps it to a stage and an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace semground
