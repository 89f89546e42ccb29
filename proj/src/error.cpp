#include "slowshift/error.hpp"

namespace slowshift {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InvalidPreparation: return "invalid-preparation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidReference: return "invalid-reference";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace slowshift
