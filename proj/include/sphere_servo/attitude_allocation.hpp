#pragma once

#include <optional>

#include "sphere_servo/so3.hpp"
#include "sphere_servo/world_dynamics.hpp"

namespace sphere_servo {

/// Below this, z* x b is treated as vanishing and the yaw axis is undefined.
inline constexpr double kYawDegeneracy = 1e-6;

/// Half-angle of the two dead-zone cones around +-z_B in which the target
/// cannot be seen.
struct VisibilityConfig {
  double varphi = 75.0 * 3.14159265358979323846 / 180.0;  // rad, [0, pi/2)

  void validate() const;
};

struct AttitudeCommand {
  Rotation3 R_des;
  double thrust = 0.0;          // N
  Vec3 omega = Vec3::Zero();    // rad/s
};

/// z* = -(u - g e3) / ||u - g e3||. Throws kDegenerateThrust for commanded
/// free fall (||u - g e3|| <= 1e-9).
UnitVector3 desired_z_star(const Vec3& u, double gravity);

/// (z* x b) / ||z* x b||, or nullopt when b is within kYawDegeneracy of +-z*.
std::optional<UnitVector3> desired_y(const UnitVector3& z_star, const UnitVector3& b);

/// Yaw axis used when desired_y() is degenerate: the previous y projected
/// orthogonal to z*, else Pi_z* e2, else Pi_z* e1.
UnitVector3 fallback_y(const UnitVector3& z_star, const std::optional<Vec3>& previous_y);

struct VisibilityCorrection {
  double psi = 0.0;             // magnitude of the extra rotation, [0, pi]
  double rotation_angle = 0.0;  // signed angle applied about y_des
  UnitVector3 z_des = UnitVector3::e3();
};

/// Rotates z* about y_des just far enough that -cos(varphi) <= b.z <= cos(varphi).
/// With y_des = z* x b / ||z* x b|| a positive rotation moves z* towards b, so
/// the signed angle is arccos(b.z*) - varphi on the upper branch and
/// varphi - arccos(-b.z*) on the lower one. The general case works with the
/// part of b orthogonal to y_des, which also covers a fallback y_des.
/// Inputs already inside the band are returned unchanged with psi = 0.
VisibilityCorrection visibility_correction(const UnitVector3& z_star, const UnitVector3& b,
                                           const UnitVector3& y_des, const VisibilityConfig& cfg);

/// R_des = [y x z, y, z]. Throws kNonOrthogonal if |y.z| > 1e-6; smaller
/// residuals are removed before assembly.
Rotation3 build_attitude(const UnitVector3& z_des, const UnitVector3& y_des);

/// T = -z_B . m (u - g e3), clamped to [0, max_thrust].
double thrust_from_accel(const Vec3& u, const Vec3& z_body, const VehicleParams& params);

/// e_R = 0.5 unskew(R_des^T R - R^T R_des).
Vec3 attitude_error(const Rotation3& R, const Rotation3& R_des);

/// omega = -K_R e_R.
Vec3 attitude_rate_command(const Rotation3& R, const Rotation3& R_des, const Mat3& K_R);

struct AllocationMemory {
  std::optional<Vec3> previous_y;
};

struct AllocationResult {
  AttitudeCommand command;
  UnitVector3 z_star = UnitVector3::e3();
  VisibilityCorrection correction;
  bool yaw_degenerate = false;
  bool thrust_degenerate = false;
  AllocationMemory next;
};

/// Full allocation chain for one control period: z*, yaw axis, visibility
/// correction, attitude assembly, thrust along the current body z, and the
/// rate command. In commanded free fall the current body z stands in for z*.
AllocationResult allocate(const Vec3& u, const UnitVector3& b, const Rotation3& attitude,
                          const VehicleParams& params, const VisibilityConfig& vis,
                          const Mat3& K_R, const AllocationMemory& mem);

}  // namespace sphere_servo
