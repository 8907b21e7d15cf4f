#pragma once

#include <stdexcept>
#include <string>

namespace aircap {

/// Failure categories. The CLI maps them to exit codes: numerical -> 1,
/// validation and I/O -> 2.
enum class ErrorKind {
  kValidation,
  kNumerical,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail_validation(const std::string& message);
[[noreturn]] void fail_numerical(const std::string& message);
[[noreturn]] void fail_io(const std::string& message);

/// Throws a validation error unless `value` is finite.
void require_finite(double value, const char* name);

/// Re-throws `e` with "stage '<stage>': " prefixed, keeping its kind.
[[noreturn]] void rethrow_with_stage(const Error& e, const std::string& stage);

}  // namespace aircap
