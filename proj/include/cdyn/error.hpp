#pragma once

#include <stdexcept>
#include <string>

namespace cdyn {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorCode {
  Parse,                 // malformed text input or configuration
  InvalidArgument,       // precondition violated by the caller
  SizeLimit,             // degree / coefficient cap exceeded
  NonConvergence,
  DegreeZero,
  NotACycle,
  AmbiguousGrouping,
  ExceptionalBasepoint,
  ResonantMultiplier,
  SmallDenominator,
  NotAttracting,
  NotSuperattracting,
  NotTangentToIdentity,
  WrongOrder,
  UndefinedAtAtom,
  PostcriticalOverlap,
  OutsideDisc,
  NotASelfMap,
  NotNormalized,
  AssertionFailed,       // an internal mathematical postcondition did not hold
};

const char* to_string(ErrorCode code) noexcept;

/// Process exit code for a failure category:
/// 2 parse, 3 numerical, 4 exceptional basepoint, 5 resonance, 6 not a self-map.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cdyn
