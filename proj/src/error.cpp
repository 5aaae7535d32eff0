#include "sphere_servo/error.hpp"

namespace sphere_servo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotSkewSymmetric: return "NotSkewSymmetric";
    case ErrorCode::kDegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kInsideTarget: return "InsideTarget";
    case ErrorCode::kSingularAngle: return "SingularAngle";
    case ErrorCode::kSingularX: return "SingularX";
    case ErrorCode::kSingularGain: return "SingularGain";
    case ErrorCode::kDegenerateThrust: return "DegenerateThrust";
    case ErrorCode::kNonOrthogonal: return "NonOrthogonal";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sphere_servo
