#pragma once

#include <stdexcept>
#include <string>

namespace driftpool {

enum class ErrorKind {
  Validation,  // bad configuration, manifest, spec, or CLI usage
  Shape,       // window/forecast length mismatch
  Numeric,     // non-finite value or degenerate statistic
  Sizing,      // series too short for the requested split
  Io,          // missing file, unwritable output
  Parse,       // malformed data file contents
  ColumnNotFound,
  State,       // internal invariant violated
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace driftpool
