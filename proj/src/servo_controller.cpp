#include "sphere_servo/servo_controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "sphere_servo/error.hpp"

namespace sphere_servo {

double ReferenceSpec::x() const { return std::sin(theta); }

void ReferenceSpec::validate() const {
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::kConfigInvalid, "reference.theta must lie in [0, pi/2)");
  }
}

bool is_positive_semidefinite(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

void GainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
  };
  require(k1 > 0.0, "gains.k1 must be positive");
  require(k2 > 0.0, "gains.k2 must be positive");
  require(k_r > 0.0, "gains.k_r must be positive");
  require(is_positive_semidefinite(K3), "gains.K3 must be symmetric positive semi-definite");
  require(is_positive_semidefinite(K_rho), "gains.K_rho must be symmetric positive semi-definite");
  require(is_positive_semidefinite(K_R), "gains.K_R must be symmetric positive semi-definite");
}

ErrorTriple compute_errors(const UnitVector3& b, double x, const Vec3& w_meas,
                           const ReferenceSpec& ref, const Vec3& w_d) {
  return {b.vec() - ref.bearing.vec(), x - ref.x(), w_meas - w_d};
}

Vec3 desired_velocity(const UnitVector3& b, double x, double delta2, const ReferenceSpec& ref,
                      const GainConfig& gains) {
  if (x < kXMin) throw Error(ErrorCode::kSingularX, "x below the desired-velocity limit");
  return (gains.k1 / x) * project_orthogonal(b, ref.bearing) +
         (gains.k2 / (x * x)) * delta2 * b.vec();
}

Vec3 desired_velocity_saturated(const UnitVector3& b, double x, double delta2,
                                const ReferenceSpec& ref, const GainConfig& gains) {
  return desired_velocity(b, std::max(x, kXMin), delta2, ref, gains);
}

ControlOutput control_law(const ErrorTriple& err, const UnitVector3& b, double x,
                          const ReferenceSpec& ref, const ControllerMemory& mem,
                          const GainConfig& gains, const Vec3& wd_dot) {
  ControlOutput out;
  out.u0 = mem.rho_hat - wd_dot - x * project_orthogonal(b, ref.bearing) -
           x * x * err.delta2 * b.vec() + gains.K3 * err.delta3;
  out.u = mem.r_hat * out.u0;
  return out;
}

ControllerMemory update_observers(const ControllerMemory& mem, const ErrorTriple& err,
                                  const Vec3& u0, const GainConfig& gains, double dt) {
  ControllerMemory next = mem;
  next.r_hat = std::max(mem.r_hat + dt * gains.k_r * err.delta3.dot(u0), kRHatMin);
  next.rho_hat = mem.rho_hat + dt * (gains.K_rho * err.delta3);
  return next;
}

Vec3 wd_dot_estimate(const ControllerMemory& mem, const Vec3& wd_now, double dt) {
  if (!mem.has_previous_wd) return Vec3::Zero();
  return (wd_now - mem.previous_wd) / dt;
}

ControllerMemory remember_desired_velocity(const ControllerMemory& mem, const Vec3& wd) {
  ControllerMemory next = mem;
  next.has_previous_wd = true;
  next.previous_wd = wd;
  return next;
}

LyapunovValues lyapunov_diagnostics(const ErrorTriple& err, const UnitVector3& b,
                                    const ControllerMemory& mem, const TrackingTruth& truth,
                                    const GainConfig& gains) {
  Eigen::FullPivLU<Mat3> lu(gains.K_rho);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularGain, "K_rho must be invertible for V3");
  }
  const double r_tilde = truth.radius - mem.r_hat;
  const Vec3 rho_tilde = truth.target_acceleration / truth.radius - mem.rho_hat;

  LyapunovValues v;
  v.V1 = 0.5 * err.delta1.squaredNorm() + 0.5 * err.delta2 * err.delta2;
  v.V2 = v.V1 + 0.5 * err.delta3.squaredNorm();
  v.V3 = v.V2 + r_tilde * r_tilde / (2.0 * gains.k_r * truth.radius) +
         0.5 * rho_tilde.dot(lu.solve(rho_tilde));
  v.W = gains.k1 * err.delta1.dot(project_orthogonal(b, err.delta1)) +
        gains.k2 * err.delta2 * err.delta2;
  v.velocity_term = err.delta3.dot(gains.K3 * err.delta3);
  return v;
}

ServoController::ServoController(ReferenceSpec ref, GainConfig gains, ControllerMemory initial)
    : ref_(std::move(ref)), gains_(std::move(gains)), mem_(std::move(initial)) {
  ref_.validate();
  gains_.validate();
}

ServoOutput ServoController::update(const UnitVector3& b, double x, const Vec3& w_meas, double dt) {
  ServoOutput out;
  const double delta2 = x - ref_.x();
  out.w_d = desired_velocity_saturated(b, x, delta2, ref_, gains_);
  out.errors = compute_errors(b, x, w_meas, ref_, out.w_d);
  if (gains_.include_wd_dot) out.wd_dot = wd_dot_estimate(mem_, out.w_d, dt);
  out.control = control_law(out.errors, b, x, ref_, mem_, gains_, out.wd_dot);

  mem_ = update_observers(mem_, out.errors, out.control.u0, gains_, dt);
  mem_ = remember_desired_velocity(mem_, out.w_d);
  return out;
}

}  // namespace sphere_servo
