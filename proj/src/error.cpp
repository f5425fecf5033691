#include "fhslab/error.hpp"

namespace fhs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::non_integrable_weight: return "non-integrable-weight";
    case ErrorCode::invalid_data: return "invalid-data";
    case ErrorCode::solver_failure: return "solver-failure";
    case ErrorCode::numerical_instability: return "numerical-instability";
    case ErrorCode::consistency_failure: return "consistency-failure";
    case ErrorCode::degenerate_input: return "degenerate-input";
    case ErrorCode::degenerate_configuration: return "degenerate-configuration";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

}  // namespace fhs
