#include "sphere_servo/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphere_servo/error.hpp"

namespace sphere_servo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Unit vector orthogonal to `b`: the normalized part of `preferred` that is
// orthogonal to b, or of `fallback` if b is (nearly) parallel to `preferred`.
Vec3 orthogonal_direction(const UnitVector3& b, const Vec3& preferred, const Vec3& fallback) {
  Vec3 n = project_orthogonal(b, preferred);
  if (n.norm() < 1e-6) n = project_orthogonal(b, fallback);
  return n.normalized();
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(bearing_angle_std_deg >= 0.0) || !(theta_std_deg >= 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "noise standard deviations must be non-negative");
  }
}

UnitVector3 tangent_bearing(const UnitVector3& b_body, double theta) {
  const Vec3 n = orthogonal_direction(b_body, Vec3::UnitZ(), Vec3::UnitY());
  return UnitVector3(std::cos(theta) * b_body.vec() + std::sin(theta) * n);
}

BearingAngleObservation make_observation(const UnitVector3& b_body, double theta,
                                         const Rotation3& attitude) {
  return BearingAngleObservation{b_body, tangent_bearing(b_body, theta), theta,
                                 attitude * b_body, std::sin(theta)};
}

BearingAngleObservation observe(const RigidBodyState& vehicle, const TargetState& target,
                                double radius) {
  const Vec3 p = target.position - vehicle.position;
  const double d = p.norm();
  if (!(d > radius)) {
    throw Error(ErrorCode::kInsideTarget, "vehicle is inside the target sphere");
  }
  const UnitVector3 b_body(vehicle.attitude.matrix().transpose() * p);
  return make_observation(b_body, std::asin(radius / d), vehicle.attitude);
}

BearingAngleObservation add_noise(const BearingAngleObservation& obs, const NoiseConfig& cfg,
                                  Rng& rng, const Rotation3& attitude) {
  const UnitVector3& b = obs.b_body;
  const Vec3 e_a = orthogonal_direction(b, Vec3::UnitZ(), Vec3::UnitY());
  const Vec3 e_b = b.vec().cross(e_a);

  const double azimuth = 2.0 * std::numbers::pi * rng.uniform();
  const double angle = rng.normal(0.0, cfg.bearing_angle_std_deg * kDegToRad);
  const UnitVector3 axis(std::cos(azimuth) * e_a + std::sin(azimuth) * e_b);
  const UnitVector3 noisy_b = rodrigues(angle, axis) * b;

  const double theta_noise = rng.normal(0.0, cfg.theta_std_deg * kDegToRad);
  const double theta = std::clamp(obs.theta + theta_noise, kThetaMin,
                                  std::numbers::pi / 2.0 - kThetaMaxMargin);
  return make_observation(noisy_b, theta, attitude);
}

ScaledVelocityMeasurement measure_scaled_velocity(const BearingAngleObservation& obs, double time,
                                                  const DifferentiatorState& diff,
                                                  double lowpass_cutoff_hz) {
  if (obs.theta < kThetaMin) {
    throw Error(ErrorCode::kSingularAngle, "half-angle below the differentiation limit");
  }
  ScaledVelocityMeasurement out;
  out.next = diff;
  out.next.primed = true;
  out.next.previous_time = time;
  out.next.previous_b = obs.b_inertial.vec();
  out.next.previous_theta = obs.theta;
  if (!diff.primed) {
    out.next.b_dot.setZero();
    out.next.theta_dot = 0.0;
    return out;
  }

  const double dt = time - diff.previous_time;
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "differentiator timestamps must increase");
  }
  Vec3 b_dot = (obs.b_inertial.vec() - diff.previous_b) / dt;
  double theta_dot = (obs.theta - diff.previous_theta) / dt;
  if (lowpass_cutoff_hz > 0.0) {
    const double alpha = std::exp(-2.0 * std::numbers::pi * lowpass_cutoff_hz * dt);
    b_dot = alpha * diff.b_dot + (1.0 - alpha) * b_dot;
    theta_dot = alpha * diff.theta_dot + (1.0 - alpha) * theta_dot;
  }
  out.next.b_dot = b_dot;
  out.next.theta_dot = theta_dot;

  const double s = std::sin(obs.theta);
  const double c = std::cos(obs.theta);
  out.w = b_dot / s - obs.b_inertial.vec() * (c / (s * s)) * theta_dot;
  return out;
}

}  // namespace sphere_servo
