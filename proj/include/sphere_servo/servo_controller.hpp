#pragma once

#include "sphere_servo/so3.hpp"

namespace sphere_servo {

/// Lower bound on x = sin(theta) used in the 1/x and 1/x^2 terms of the
/// desired velocity.
inline constexpr double kXMin = 1e-3;
/// Floor on the radius estimate. u = r_hat u0 must keep the sign of u0.
inline constexpr double kRHatMin = 1e-3;

/// Constant bearing reference and desired apparent size of the target.
struct ReferenceSpec {
  UnitVector3 bearing = UnitVector3::e1();  // inertial
  double theta = 0.1;                       // rad, in [0, pi/2)

  double x() const;
  /// Throws kConfigInvalid unless theta is in [0, pi/2).
  void validate() const;
};

struct GainConfig {
  double k1 = 0.4;
  double k2 = 1.2;
  Mat3 K3 = 0.7 * Mat3::Identity();
  double k_r = 0.1;
  Mat3 K_rho = 1e-4 * Mat3::Identity();
  Mat3 K_R = 5.0 * Mat3::Identity();  // attitude tracking gain
  bool include_wd_dot = false;

  /// Throws kConfigInvalid naming the offending gain.
  void validate() const;
};

/// True for a symmetric matrix with non-negative eigenvalues (within `tol`).
bool is_positive_semidefinite(const Mat3& m, double tol = 1e-12);

struct ControllerMemory {
  double r_hat = 1.0;            // m
  Vec3 rho_hat = Vec3::Zero();   // 1/s^2, estimate of a_T / r
  bool has_previous_wd = false;
  Vec3 previous_wd = Vec3::Zero();
};

struct ErrorTriple {
  Vec3 delta1 = Vec3::Zero();  // b - b*
  double delta2 = 0.0;         // x - x*
  Vec3 delta3 = Vec3::Zero();  // w - w_d
};

ErrorTriple compute_errors(const UnitVector3& b, double x, const Vec3& w_meas,
                           const ReferenceSpec& ref, const Vec3& w_d);

/// w_d = (k1 / x) Pi_b b* + (k2 / x^2) delta2 b. Throws kSingularX if x < kXMin.
Vec3 desired_velocity(const UnitVector3& b, double x, double delta2, const ReferenceSpec& ref,
                      const GainConfig& gains);

/// desired_velocity() with x saturated at kXMin instead of throwing.
Vec3 desired_velocity_saturated(const UnitVector3& b, double x, double delta2,
                                const ReferenceSpec& ref, const GainConfig& gains);

struct ControlOutput {
  Vec3 u0 = Vec3::Zero();  // 1/s^2
  Vec3 u = Vec3::Zero();   // m/s^2
};

/// u0 = rho_hat - wd_dot - x Pi_b b* - x^2 delta2 b + K3 delta3, u = r_hat u0.
ControlOutput control_law(const ErrorTriple& err, const UnitVector3& b, double x,
                          const ReferenceSpec& ref, const ControllerMemory& mem,
                          const GainConfig& gains, const Vec3& wd_dot);

/// One forward-Euler step of r_hat' = k_r delta3.u0 and rho_hat' = K_rho delta3.
/// r_hat is floored at kRHatMin.
ControllerMemory update_observers(const ControllerMemory& mem, const ErrorTriple& err,
                                  const Vec3& u0, const GainConfig& gains, double dt);

/// Backward difference of w_d against the stored value; zero on first use.
Vec3 wd_dot_estimate(const ControllerMemory& mem, const Vec3& wd_now, double dt);

ControllerMemory remember_desired_velocity(const ControllerMemory& mem, const Vec3& wd);

/// Ground truth that only a simulator has.
struct TrackingTruth {
  double radius;
  Vec3 target_acceleration;
};

struct LyapunovValues {
  double V1 = 0.0;
  double V2 = 0.0;
  double V3 = 0.0;
  double W = 0.0;           // k1 d1' Pi_b d1 + k2 d2^2
  double velocity_term = 0.0;  // d3' K3 d3
};

/// Throws kSingularGain if K_rho is not invertible.
LyapunovValues lyapunov_diagnostics(const ErrorTriple& err, const UnitVector3& b,
                                    const ControllerMemory& mem, const TrackingTruth& truth,
                                    const GainConfig& gains);

struct ServoOutput {
  ErrorTriple errors;
  Vec3 w_d = Vec3::Zero();
  Vec3 wd_dot = Vec3::Zero();
  ControlOutput control;
};

/// Stateful wrapper running the whole outer loop once per control period:
/// desired velocity, errors, optional w_d rate, control law, then observer
/// and w_d memory updates.
class ServoController {
 public:
  ServoController(ReferenceSpec ref, GainConfig gains, ControllerMemory initial);

  ServoOutput update(const UnitVector3& b, double x, const Vec3& w_meas, double dt);

  const ControllerMemory& memory() const { return mem_; }
  const ReferenceSpec& reference() const { return ref_; }
  const GainConfig& gains() const { return gains_; }

 private:
  ReferenceSpec ref_;
  GainConfig gains_;
  ControllerMemory mem_;
};

}  // namespace sphere_servo
