#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphere_servo/attitude_allocation.hpp"
#include "sphere_servo/sensing.hpp"
#include "sphere_servo/servo_controller.hpp"
#include "sphere_servo/world_dynamics.hpp"

namespace sphere_servo {

/// Where the controller's scaled velocity comes from.
enum class VelocitySource {
  kDifferentiated,  // backward differences of (b, theta)
  kGroundTruth,     // (v_T - v_B) / r from the simulator
};

/// How the vehicle realizes the commanded acceleration u.
enum class ActuationModel {
  kRigidBody,          // thrust along R e3, attitude driven by the rate command
  kIdealAcceleration,  // v_B' = u exactly
};

struct ObserverInit {
  double r_hat = 1.0;
  Vec3 rho_hat = Vec3::Zero();
};

struct ScenarioConfig {
  WorldState initial;
  double target_radius = 0.25;
  ReferenceSpec reference;
  GainConfig gains;
  ObserverInit observers;
  NoiseConfig noise;
  /// First-order low-pass on the differenced rates. Unset resolves to 20 Hz
  /// when noise is enabled and to 0 (off) otherwise.
  std::optional<double> lowpass_cutoff_hz;
  VisibilityConfig visibility;
  VehicleParams vehicle;
  double dt_physics = 1e-3;
  double dt_control = 1e-3;
  double duration = 120.0;
  VelocitySource velocity_source = VelocitySource::kDifferentiated;
  ActuationModel actuation = ActuationModel::kRigidBody;

  /// Throws kConfigInvalid with the offending field path in the message.
  void validate() const;
  double resolved_lowpass_cutoff_hz() const;
  int physics_substeps() const;
  long control_steps() const;
};

/// One row per control step, in CSV column order.
struct LogRecord {
  double t = 0.0;
  Vec3 p_B = Vec3::Zero();
  Vec3 v_B = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 p_T = Vec3::Zero();
  Vec3 v_T = Vec3::Zero();
  Vec3 b = Vec3::Zero();  // inertial bearing used by the controller
  double theta = 0.0;
  double x = 0.0;
  Vec3 delta1 = Vec3::Zero();
  double delta2 = 0.0;
  Vec3 delta3 = Vec3::Zero();
  Vec3 w_d = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  Vec3 u0 = Vec3::Zero();
  double T = 0.0;
  double psi = 0.0;
  double r_hat = 0.0;
  Vec3 rho_hat = Vec3::Zero();
  double V1 = 0.0;
  double V2 = 0.0;
  double V3 = 0.0;
  bool noisy = false;
};

enum class RunStatus {
  kCompleted,
  kInsideTarget,
  kNonFiniteState,
  kSingularAngle,
  kConfigInvalid,
};

std::string_view to_string(RunStatus status);

struct RunResult {
  std::vector<LogRecord> records;
  RunStatus status = RunStatus::kCompleted;
  std::string fault_message;
  /// cos(varphi) - |b . z_des| per record, for the commanded attitude.
  std::vector<double> commanded_visibility_margin;

  bool completed() const { return status == RunStatus::kCompleted; }
};

/// Closed loop at dt_control: observe, differentiate, control, allocate, log,
/// then hold (T, omega) or u over dt_control / dt_physics RK4 substeps. Faults
/// after validation stop the run and are reported in the result.
/// Throws kConfigInvalid for an invalid configuration.
RunResult run(const ScenarioConfig& cfg);

/// Independent runs on up to `threads` workers (0 = hardware concurrency).
/// Invalid configurations yield a kConfigInvalid result instead of throwing.
std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, unsigned threads = 0);

/// Accelerating-target scenario: vehicle at [0, 0, -1.8], target at
/// [3, 0.1, -1] accelerating at [-0.01, 0.01, 0], r = 0.25 m, bearing
/// reference along [-1, 0.001, 0], theta* = 0.125 rad, 1 deg bearing noise.
ScenarioConfig paper_scenario();

struct DiagnosticSeries {
  std::vector<double> r_tilde;
  std::vector<Vec3> rho_tilde;
  std::vector<double> V3_rate;  // forward differences, one shorter than the log
  std::vector<double> visibility_margin;  // cos(varphi) - |b . R e3|
  double min_visibility_margin = 0.0;
};

DiagnosticSeries diagnostics(std::span<const LogRecord> records, const TrackingTruth& truth,
                             const VisibilityConfig& vis);

}  // namespace sphere_servo
