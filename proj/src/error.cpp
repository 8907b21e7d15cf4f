#include "aircap/error.hpp"

#include <cmath>

namespace aircap {

void fail_validation(const std::string& message) {
  throw Error(ErrorKind::kValidation, message);
}

void fail_numerical(const std::string& message) {
  throw Error(ErrorKind::kNumerical, message);
}

void fail_io(const std::string& message) { throw Error(ErrorKind::kIo, message); }

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    fail_validation(std::string(name) + " must be finite");
  }
}

void rethrow_with_stage(const Error& e, const std::string& stage) {
  throw Error(e.kind(), "stage '" + stage + "': " + e.what());
}

}  // namespace aircap
