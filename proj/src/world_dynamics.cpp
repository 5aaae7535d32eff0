#include "sphere_servo/world_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sphere_servo/error.hpp"

namespace sphere_servo {
namespace {

// Flat layout: [p_B(3) v_B(3) R(9, column-major) p_T(3) v_T(3) a_T(3)].
using Packed = Eigen::Matrix<double, 24, 1>;

Packed pack(const Vec3& pb, const Vec3& vb, const Mat3& r, const TargetState& t) {
  Packed x;
  x.segment<3>(0) = pb;
  x.segment<3>(3) = vb;
  x.segment<9>(6) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(r.data());
  x.segment<3>(15) = t.position;
  x.segment<3>(18) = t.velocity;
  x.segment<3>(21) = t.acceleration;
  return x;
}

Mat3 attitude_of(const Packed& x) { return Eigen::Map<const Mat3>(x.data() + 6); }

// Rate of the translational velocity given the current (possibly
// unnormalized) attitude within an RK4 stage.
using VehicleAccel = std::function<Vec3(const Mat3&)>;

Packed derivative(const Packed& x, const VehicleAccel& accel, const Vec3& omega) {
  const Mat3 r = attitude_of(x);
  const Mat3 r_dot = r * skew(omega);
  Packed d;
  d.segment<3>(0) = x.segment<3>(3);
  d.segment<3>(3) = accel(r);
  d.segment<9>(6) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(r_dot.data());
  d.segment<3>(15) = x.segment<3>(18);
  d.segment<3>(18) = x.segment<3>(21);
  d.segment<3>(21).setZero();
  return d;
}

WorldState rk4(const WorldState& world, const VehicleAccel& accel, const Vec3& omega, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  const Packed x0 = pack(world.vehicle.position, world.vehicle.velocity,
                         world.vehicle.attitude.matrix(), world.target);
  const Packed k1 = derivative(x0, accel, omega);
  const Packed k2 = derivative(x0 + 0.5 * dt * k1, accel, omega);
  const Packed k3 = derivative(x0 + 0.5 * dt * k2, accel, omega);
  const Packed k4 = derivative(x0 + dt * k3, accel, omega);
  const Packed x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!x1.allFinite()) {
    throw Error(ErrorCode::kNonFiniteState, "state became non-finite during integration");
  }

  WorldState out;
  out.vehicle.position = x1.segment<3>(0);
  out.vehicle.velocity = x1.segment<3>(3);
  try {
    out.vehicle.attitude = renormalize(attitude_of(x1));
  } catch (const Error&) {
    throw Error(ErrorCode::kNonFiniteState, "attitude degenerated during integration");
  }
  out.target.position = x1.segment<3>(15);
  out.target.velocity = x1.segment<3>(18);
  // The target acceleration has zero rate; copy it instead of re-summing.
  out.target.acceleration = world.target.acceleration;
  return out;
}

}  // namespace

void VehicleParams::validate() const {
  if (!(mass > 0.0) || !(gravity > 0.0) || !(max_thrust > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "vehicle mass, gravity and max_thrust must be positive");
  }
}

double clamp_thrust(double thrust, const VehicleParams& params) {
  if (std::isnan(thrust)) return thrust;
  return std::clamp(thrust, 0.0, params.max_thrust);
}

VehicleDerivative vehicle_derivative(const RigidBodyState& s, const ActuationInput& input,
                                     const VehicleParams& params) {
  const Mat3& r = s.attitude.matrix();
  return {s.velocity,
          params.gravity * Vec3::UnitZ() - (input.thrust / params.mass) * r.col(2),
          r * skew(input.omega)};
}

TargetDerivative target_derivative(const TargetState& t) {
  return {t.velocity, t.acceleration, Vec3::Zero()};
}

WorldState step(const WorldState& world, const ActuationInput& input, double dt,
                const VehicleParams& params) {
  const double thrust = clamp_thrust(input.thrust, params);
  const double g = params.gravity;
  const double specific = thrust / params.mass;
  return rk4(
      world, [=](const Mat3& r) -> Vec3 { return g * Vec3::UnitZ() - specific * r.col(2); },
      input.omega, dt);
}

WorldState step_with_acceleration(const WorldState& world, const Vec3& acceleration,
                                  const Vec3& omega, double dt) {
  return rk4(world, [&](const Mat3&) -> Vec3 { return acceleration; }, omega, dt);
}

}  // namespace sphere_servo
