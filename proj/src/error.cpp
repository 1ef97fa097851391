#include "driftpool/error.hpp"

namespace driftpool {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Sizing: return "sizing";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::ColumnNotFound: return "column-not-found";
    case ErrorKind::State: return "state";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Sizing:
      return kExitValidation;
    case ErrorKind::Io:
    case ErrorKind::Parse:
    case ErrorKind::ColumnNotFound:
      return kExitIo;
    case ErrorKind::Shape:
    case ErrorKind::Numeric:
    case ErrorKind::State:
      return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace driftpool
