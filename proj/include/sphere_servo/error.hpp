#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphere_servo {

enum class ErrorCode {
  kNotSkewSymmetric,
  kDegenerateMatrix,
  kNonFiniteState,
  kInsideTarget,
  kSingularAngle,
  kSingularX,
  kSingularGain,
  kDegenerateThrust,
  kNonOrthogonal,
  kConfigInvalid,
  kSchemaMismatch,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sphere_servo
