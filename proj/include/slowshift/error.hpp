#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slowshift {

enum class ErrorKind {
  InvalidParameter,
  OutOfRange,
  InvalidPreparation,
  Precondition,
  NumericalFailure,
  InvalidInput,
  InvalidReference,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a category so the CLI can map
/// it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace slowshift
