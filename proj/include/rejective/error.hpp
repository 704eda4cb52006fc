#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rejective {

enum class ErrorCode {
  SumMismatch,
  OutOfRange,
  Infeasible,
  DegenerateDesign,
  BadIndex,
  ZeroDenominator,
  TooLarge,
  OrderTooLarge,
  MissingCumulant,
  DTildeNonpositive,
  NoConvergence,
  InfeasibleTarget,
  DegenerateFit,
  MissingEntry,
  GuardViolation,
  ParameterOrderViolated,
  MaxAttemptsExceeded,
  NumericGuard,
  BadInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rejective
