#pragma once

#include <stdexcept>
#include <string>

namespace fhs {

enum class ErrorCode {
  invalid_argument = 1,
  non_integrable_weight,
  invalid_data,
  solver_failure,
  numerical_instability,
  consistency_failure,
  degenerate_input,
  degenerate_configuration,
  insufficient_data,
  io_error,
  config_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace fhs
