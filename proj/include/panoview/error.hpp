#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace panoview {

enum class ErrorKind {
  InvalidCoordinate,
  OutsideHemisphere,
  InvalidConfig,
  DecodeError,
  AspectError,
  IndivisibleSize,
  EmptyPatch,
  InvalidThreshold,
  TooFewPaths,
  EmptyInput,
  SchemaError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorKind::OutsideHemisphere: return "OutsideHemisphere";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::AspectError: return "AspectError";
    case ErrorKind::IndivisibleSize: return "IndivisibleSize";
    case ErrorKind::EmptyPatch: return "EmptyPatch";
    case ErrorKind::InvalidThreshold: return "InvalidThreshold";
    case ErrorKind::TooFewPaths: return "TooFewPaths";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace panoview
