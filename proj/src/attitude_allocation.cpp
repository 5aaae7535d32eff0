#include "sphere_servo/attitude_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphere_servo/error.hpp"

namespace sphere_servo {

void VisibilityConfig::validate() const {
  if (!(varphi >= 0.0 && varphi < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::kConfigInvalid, "visibility.varphi must lie in [0, pi/2)");
  }
}

UnitVector3 desired_z_star(const Vec3& u, double gravity) {
  const Vec3 f = u - gravity * Vec3::UnitZ();
  if (f.norm() <= 1e-9) {
    throw Error(ErrorCode::kDegenerateThrust, "commanded acceleration equals free fall");
  }
  return UnitVector3(-f);
}

std::optional<UnitVector3> desired_y(const UnitVector3& z_star, const UnitVector3& b) {
  const Vec3 c = z_star.vec().cross(b.vec());
  if (c.norm() < kYawDegeneracy) return std::nullopt;
  return UnitVector3(c);
}

UnitVector3 fallback_y(const UnitVector3& z_star, const std::optional<Vec3>& previous_y) {
  for (const Vec3& candidate : {previous_y.value_or(Vec3::Zero()), Vec3(Vec3::UnitY()),
                                Vec3(Vec3::UnitX())}) {
    const Vec3 p = project_orthogonal(z_star, candidate);
    if (p.norm() > 1e-6) return UnitVector3(p);
  }
  // Unreachable: e1 and e2 cannot both be parallel to z*.
  return UnitVector3(project_orthogonal(z_star, Vec3::UnitZ()));
}

VisibilityCorrection visibility_correction(const UnitVector3& z_star, const UnitVector3& b,
                                           const UnitVector3& y_des, const VisibilityConfig& cfg) {
  const double bound = std::cos(cfg.varphi);
  VisibilityCorrection out;
  out.z_des = z_star;
  const double c = b.dot(z_star);
  if (c >= -bound && c <= bound) return out;

  // Rotations about y_des keep z in the plane orthogonal to y_des, where only
  // the in-plane part of b can be seen.
  const Vec3 b_plane = project_orthogonal(y_des, b);
  const double s = b_plane.norm();
  if (s <= bound) return out;

  const double edge = std::acos(bound / s);
  const double alpha = std::acos(std::clamp(b_plane.dot(z_star.vec()) / s, -1.0, 1.0));
  const double toward = y_des.vec().cross(z_star.vec()).dot(b_plane) >= 0.0 ? 1.0 : -1.0;

  double angle = 0.0;
  if (alpha < edge) {
    angle = -toward * (edge - alpha);
  } else if (alpha > std::numbers::pi - edge) {
    angle = toward * (alpha - (std::numbers::pi - edge));
  }
  out.rotation_angle = angle;
  out.psi = std::abs(angle);
  out.z_des = UnitVector3(rodrigues(angle, y_des) * z_star.vec());
  return out;
}

Rotation3 build_attitude(const UnitVector3& z_des, const UnitVector3& y_des) {
  if (std::abs(y_des.dot(z_des)) > 1e-6) {
    throw Error(ErrorCode::kNonOrthogonal, "desired y and z axes are not orthogonal");
  }
  const Vec3 z = z_des.vec();
  const Vec3 y = project_orthogonal(z_des, y_des).normalized();
  Mat3 r;
  r.col(0) = y.cross(z);
  r.col(1) = y;
  r.col(2) = z;
  return Rotation3::unchecked(r);
}

double thrust_from_accel(const Vec3& u, const Vec3& z_body, const VehicleParams& params) {
  const Vec3 force = params.mass * (u - params.gravity * Vec3::UnitZ());
  return clamp_thrust(-z_body.dot(force), params);
}

Vec3 attitude_error(const Rotation3& R, const Rotation3& R_des) {
  const Mat3 a = R_des.matrix().transpose() * R.matrix();
  return 0.5 * unskew(a - a.transpose());
}

Vec3 attitude_rate_command(const Rotation3& R, const Rotation3& R_des, const Mat3& K_R) {
  return -K_R * attitude_error(R, R_des);
}

AllocationResult allocate(const Vec3& u, const UnitVector3& b, const Rotation3& attitude,
                          const VehicleParams& params, const VisibilityConfig& vis,
                          const Mat3& K_R, const AllocationMemory& mem) {
  AllocationResult out;
  try {
    out.z_star = desired_z_star(u, params.gravity);
  } catch (const Error&) {
    out.thrust_degenerate = true;
    out.z_star = UnitVector3(attitude.z_axis());
  }

  const std::optional<UnitVector3> y = desired_y(out.z_star, b);
  out.yaw_degenerate = !y.has_value();
  const UnitVector3 y_des = y ? *y : fallback_y(out.z_star, mem.previous_y);

  out.correction = visibility_correction(out.z_star, b, y_des, vis);
  out.command.R_des = build_attitude(out.correction.z_des, y_des);
  out.command.thrust = thrust_from_accel(u, attitude.z_axis(), params);
  out.command.omega = attitude_rate_command(attitude, out.command.R_des, K_R);
  out.next.previous_y = out.command.R_des.matrix().col(1);
  return out;
}

}  // namespace sphere_servo
