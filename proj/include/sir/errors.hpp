#pragma once

#include <stdexcept>
#include <string>

namespace sir {

// Error taxonomy; the CLI maps categories to distinct exit codes.
enum class ErrorCode {
  invalid_input,        // malformed files, bad dimensions, bad options
  insufficient_periods, // T < 2 or not enough modeled periods left
  dimension_mismatch,
  singular_design,      // rank-deficient GLM design
  divergence,           // IWLS could not make progress
  boundary_mle,         // MLE on the boundary (e.g. all-zero response)
  non_identifiable,     // alpha_1 ~ 0 at canonicalization
  singular_information, // Hessian not invertible
  instability,          // simulated dynamics exploded
  infeasible_folds,
  io_error,
};

class SirError : public std::runtime_error {
public:
  SirError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw SirError(code, msg);
}

} // namespace sir
