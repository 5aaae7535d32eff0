#pragma once

#include "sphere_servo/so3.hpp"

namespace sphere_servo {

/// Multirotor state in the inertial frame. The inertial z axis points down, so
/// gravity acts along +e3 and altitude is negative z.
struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Rotation3 attitude;  // body-to-inertial
};

/// Constant-acceleration target.
struct TargetState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

struct VehicleParams {
  double mass = 1.0;         // kg
  double gravity = 9.8;      // m/s^2
  double max_thrust = 34.0;  // N

  /// Throws kConfigInvalid unless all fields are strictly positive.
  void validate() const;
};

/// Total thrust and body angular velocity commanded to the vehicle.
struct ActuationInput {
  double thrust = 0.0;         // N
  Vec3 omega = Vec3::Zero();   // rad/s, body frame
};

struct VehicleDerivative {
  Vec3 position_dot;
  Vec3 velocity_dot;
  Mat3 attitude_dot;
};

struct TargetDerivative {
  Vec3 position_dot;
  Vec3 velocity_dot;
  Vec3 acceleration_dot;
};

struct WorldState {
  RigidBodyState vehicle;
  TargetState target;
};

double clamp_thrust(double thrust, const VehicleParams& params);

/// p' = v, v' = g e3 - (T/m) R e3, R' = R skew(omega).
VehicleDerivative vehicle_derivative(const RigidBodyState& s, const ActuationInput& input,
                                     const VehicleParams& params);

/// p' = v, v' = a, a' = 0.
TargetDerivative target_derivative(const TargetState& t);

/// Advances vehicle and target by one classical RK4 step of length `dt`.
/// Thrust is clamped to [0, max_thrust] first, and the attitude is projected
/// back onto SO(3) afterwards. Throws kNonFiniteState on a non-finite result
/// and kInvalidArgument for dt <= 0.
WorldState step(const WorldState& world, const ActuationInput& input, double dt,
                const VehicleParams& params);

/// Same as step(), but the vehicle's translational acceleration is imposed
/// directly instead of being produced by thrust along R e3. Attitude still
/// follows R' = R skew(omega). Used for ideal-actuation studies of the
/// translational loop.
WorldState step_with_acceleration(const WorldState& world, const Vec3& acceleration,
                                  const Vec3& omega, double dt);

}  // namespace sphere_servo
