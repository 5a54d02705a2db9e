#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace emden {

// Error taxonomy shared by the library and the CLI. Codes ending up at the
// CLI surface map to exit status 2 for usage-level mistakes (bad parameters,
// malformed configuration) and 1 for everything that fails during computation.
enum class ErrorCode {
  InvalidParams,    // parameter box violated (n, m, alpha, unit vectors...)
  RangeError,       // argument outside the admissible range of an operation
  DomainError,      // evaluation point outside a field's domain
  SingularPoint,    // evaluation exactly on the singular set
  RegimeError,      // operation not defined in this exponent regime
  CapabilityError,  // input shape not supported (by design)
  NumericError,     // iteration failed to converge, non-finite value...
  ConfigError,      // inconsistent run configuration
  DivergenceError,  // integration exceeded the blowup guard
  InconsistencyError, // measured value incompatible with every admissible limit
  UsageError        // CLI-level misuse
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidParams: return "invalid_params";
    case ErrorCode::RangeError: return "range_error";
    case ErrorCode::DomainError: return "domain_error";
    case ErrorCode::SingularPoint: return "singular_point";
    case ErrorCode::RegimeError: return "regime_error";
    case ErrorCode::CapabilityError: return "capability_error";
    case ErrorCode::NumericError: return "numeric_error";
    case ErrorCode::ConfigError: return "config_error";
    case ErrorCode::DivergenceError: return "divergence_error";
    case ErrorCode::InconsistencyError: return "inconsistency_error";
    case ErrorCode::UsageError: return "usage_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

  // Exit status contract of the CLI: parameter/usage rejection is 2,
  // failures inside a computation are 1.
  int exit_status() const noexcept {
    return (code_ == ErrorCode::InvalidParams || code_ == ErrorCode::UsageError) ? 2 : 1;
  }

 private:
  ErrorCode code_;
  std::string context_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::string context = {}) {
  throw Error(code, message, std::move(context));
}

}  // namespace emden
