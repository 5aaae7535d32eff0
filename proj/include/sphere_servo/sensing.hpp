#pragma once

#include <cstdint>

#include "sphere_servo/rng.hpp"
#include "sphere_servo/so3.hpp"
#include "sphere_servo/world_dynamics.hpp"

namespace sphere_servo {

/// Smallest half-angle the measurement pipeline accepts. Below it the 1/sin
/// and 1/sin^2 factors of the velocity reconstruction are unusable.
inline constexpr double kThetaMin = 1e-4;
/// Upper clamp margin below pi/2 for noisy half-angles.
inline constexpr double kThetaMaxMargin = 1e-6;

/// Central bearing, tangent bearing and the half-angle the target subtends.
struct BearingAngleObservation {
  UnitVector3 b_body;
  UnitVector3 b_tangent_body;
  double theta;  // rad, arccos(b_body . b_tangent_body)
  UnitVector3 b_inertial;
  double x;      // sin(theta)
};

struct NoiseConfig {
  bool enabled = false;
  double bearing_angle_std_deg = 0.0;
  double theta_std_deg = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// Tangent bearing at angle `theta` from `b_body`, in the plane spanned by
/// b_body and the normalized component of body z orthogonal to it (body y if
/// b_body is within 1e-6 of body z).
UnitVector3 tangent_bearing(const UnitVector3& b_body, double theta);

/// Builds a consistent observation from a body-frame bearing and half-angle.
BearingAngleObservation make_observation(const UnitVector3& b_body, double theta,
                                         const Rotation3& attitude);

/// Noiseless bearing-angle pair of a sphere of radius `radius` centred on the
/// target. Throws kInsideTarget when the vehicle is not strictly outside it.
BearingAngleObservation observe(const RigidBodyState& vehicle, const TargetState& target,
                                double radius);

/// Rotates the central bearing by a random angle ~ N(0, bearing std) about an
/// axis drawn uniformly in the plane orthogonal to it, and adds N(0, theta std)
/// to the half-angle (clamped to [kThetaMin, pi/2 - kThetaMaxMargin]).
/// Derived fields are rebuilt with `attitude`. The `enabled` flag is not
/// consulted here; callers decide whether to corrupt.
BearingAngleObservation add_noise(const BearingAngleObservation& obs, const NoiseConfig& cfg,
                                  Rng& rng, const Rotation3& attitude);

/// Memory for backward differencing of (b, theta), with an optional
/// first-order low-pass on the differenced rates.
struct DifferentiatorState {
  bool primed = false;
  double previous_time = 0.0;
  Vec3 previous_b = Vec3::Zero();
  double previous_theta = 0.0;
  Vec3 b_dot = Vec3::Zero();    // filtered
  double theta_dot = 0.0;       // filtered
};

struct ScaledVelocityMeasurement {
  Vec3 w = Vec3::Zero();  // 1/s
  DifferentiatorState next;
};

/// w = b_dot / sin(theta) - b cos(theta) / sin^2(theta) theta_dot, with the
/// rates formed by backward differences against the stored sample. The first
/// call only primes the memory and reports w = 0. A cutoff of 0 disables the
/// low-pass filter.
///
/// Throws kSingularAngle if theta < kThetaMin, kInvalidArgument if `time`
/// does not advance.
ScaledVelocityMeasurement measure_scaled_velocity(const BearingAngleObservation& obs, double time,
                                                  const DifferentiatorState& diff,
                                                  double lowpass_cutoff_hz = 0.0);

}  // namespace sphere_servo
