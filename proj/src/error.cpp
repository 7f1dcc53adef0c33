#include "cdyn/error.hpp"

namespace cdyn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegreeZero: return "DegreeZero";
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::AmbiguousGrouping: return "AmbiguousGrouping";
    case ErrorCode::ExceptionalBasepoint: return "ExceptionalBasepoint";
    case ErrorCode::ResonantMultiplier: return "ResonantMultiplier";
    case ErrorCode::SmallDenominator: return "SmallDenominator";
    case ErrorCode::NotAttracting: return "NotAttracting";
    case ErrorCode::NotSuperattracting: return "NotSuperattracting";
    case ErrorCode::NotTangentToIdentity: return "NotTangentToIdentity";
    case ErrorCode::WrongOrder: return "WrongOrder";
    case ErrorCode::UndefinedAtAtom: return "UndefinedAtAtom";
    case ErrorCode::PostcriticalOverlap: return "PostcriticalOverlap";
    case ErrorCode::OutsideDisc: return "OutsideDisc";
    case ErrorCode::NotASelfMap: return "NotASelfMap";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::AssertionFailed: return "AssertionFailed";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::ExceptionalBasepoint:
      return 4;
    case ErrorCode::ResonantMultiplier:
    case ErrorCode::SmallDenominator:
      return 5;
    case ErrorCode::NotASelfMap:
      return 6;
    default:
      return 3;
  }
}

}  // namespace cdyn
