#include "sphere_servo/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "sphere_servo/error.hpp"

namespace sphere_servo {
namespace {

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfigInvalid, path + ": " + what);
}

// Rethrows a member's own validation error with its field path prefixed.
template <typename F>
void validate_member(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigInvalid, path + ": " + e.what());
  }
}

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted: return "Completed";
    case RunStatus::kInsideTarget: return "InsideTarget";
    case RunStatus::kNonFiniteState: return "NonFiniteState";
    case RunStatus::kSingularAngle: return "SingularAngle";
    case RunStatus::kConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

void ScenarioConfig::validate() const {
  require(finite(initial.vehicle.position) && finite(initial.vehicle.velocity),
          "initial.vehicle", "position and velocity must be finite");
  require(is_rotation(initial.vehicle.attitude.matrix()), "initial.vehicle.attitude",
          "must be a proper rotation");
  require(finite(initial.target.position) && finite(initial.target.velocity) &&
              finite(initial.target.acceleration),
          "initial.target", "position, velocity and acceleration must be finite");
  require(target_radius > 0.0 && std::isfinite(target_radius), "target_radius", "must be positive");
  validate_member("reference", [&] { reference.validate(); });
  validate_member("gains", [&] { gains.validate(); });
  require(observers.r_hat >= kRHatMin && std::isfinite(observers.r_hat), "observers.r_hat",
          "must be at least 1e-3");
  require(finite(observers.rho_hat), "observers.rho_hat", "must be finite");
  validate_member("noise", [&] { noise.validate(); });
  if (lowpass_cutoff_hz) {
    require(*lowpass_cutoff_hz >= 0.0, "lowpass_cutoff_hz", "must be non-negative");
  }
  validate_member("visibility", [&] { visibility.validate(); });
  validate_member("vehicle", [&] { vehicle.validate(); });
  require(dt_physics > 0.0, "timing.dt_physics", "must be positive");
  require(dt_control > 0.0, "timing.dt_control", "must be positive");
  require(duration >= 0.0 && std::isfinite(duration), "timing.duration", "must be non-negative");
  const double ratio = dt_control / dt_physics;
  require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio,
          "timing.dt_control", "must be an integer multiple of dt_physics");
}

double ScenarioConfig::resolved_lowpass_cutoff_hz() const {
  if (lowpass_cutoff_hz) return *lowpass_cutoff_hz;
  return noise.enabled ? 20.0 : 0.0;
}

int ScenarioConfig::physics_substeps() const {
  return static_cast<int>(std::lround(dt_control / dt_physics));
}

long ScenarioConfig::control_steps() const {
  return std::lround(std::floor(duration / dt_control + 1e-9));
}

RunResult run(const ScenarioConfig& cfg) {
  cfg.validate();

  RunResult result;
  const long steps = cfg.control_steps();
  const int substeps = cfg.physics_substeps();
  const double dt_physics = cfg.dt_control / substeps;
  const double lowpass = cfg.resolved_lowpass_cutoff_hz();
  const double margin_bound = std::cos(cfg.visibility.varphi);
  const TrackingTruth truth{cfg.target_radius, cfg.initial.target.acceleration};
  const bool k_rho_invertible = std::abs(cfg.gains.K_rho.determinant()) > 0.0;
  result.records.reserve(static_cast<std::size_t>(std::max(steps, 0L)));
  result.commanded_visibility_margin.reserve(result.records.capacity());

  ControllerMemory initial_memory;
  initial_memory.r_hat = cfg.observers.r_hat;
  initial_memory.rho_hat = cfg.observers.rho_hat;
  ServoController controller(cfg.reference, cfg.gains, initial_memory);

  WorldState world = cfg.initial;
  Rng rng(cfg.noise.rng_seed);
  DifferentiatorState diff;
  AllocationMemory alloc_memory;

  auto fault = [&](RunStatus status, const std::string& message) {
    result.status = status;
    result.fault_message = message;
    return result;
  };

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt_control;
    const RigidBodyState& vehicle = world.vehicle;

    std::optional<BearingAngleObservation> obs;
    try {
      obs = observe(vehicle, world.target, cfg.target_radius);
    } catch (const Error& e) {
      return fault(RunStatus::kInsideTarget, e.what());
    }
    if (cfg.noise.enabled) obs = add_noise(*obs, cfg.noise, rng, vehicle.attitude);

    Vec3 w_meas;
    if (cfg.velocity_source == VelocitySource::kGroundTruth) {
      w_meas = (world.target.velocity - vehicle.velocity) / cfg.target_radius;
    } else {
      try {
        ScaledVelocityMeasurement m = measure_scaled_velocity(*obs, t, diff, lowpass);
        w_meas = m.w;
        diff = m.next;
      } catch (const Error& e) {
        return fault(RunStatus::kSingularAngle, e.what());
      }
    }

    const ControllerMemory memory_k = controller.memory();
    const ServoOutput servo = controller.update(obs->b_inertial, obs->x, w_meas, cfg.dt_control);

    const AllocationResult alloc =
        allocate(servo.control.u, obs->b_inertial, vehicle.attitude, cfg.vehicle, cfg.visibility,
                 cfg.gains.K_R, alloc_memory);
    alloc_memory = alloc.next;

    LogRecord rec;
    rec.t = t;
    rec.p_B = vehicle.position;
    rec.v_B = vehicle.velocity;
    rec.R = vehicle.attitude.matrix();
    rec.p_T = world.target.position;
    rec.v_T = world.target.velocity;
    rec.b = obs->b_inertial.vec();
    rec.theta = obs->theta;
    rec.x = obs->x;
    rec.delta1 = servo.errors.delta1;
    rec.delta2 = servo.errors.delta2;
    rec.delta3 = servo.errors.delta3;
    rec.w_d = servo.w_d;
    rec.u = servo.control.u;
    rec.u0 = servo.control.u0;
    rec.T = alloc.command.thrust;
    rec.psi = alloc.correction.psi;
    rec.r_hat = memory_k.r_hat;
    rec.rho_hat = memory_k.rho_hat;
    if (k_rho_invertible) {
      const LyapunovValues v =
          lyapunov_diagnostics(servo.errors, obs->b_inertial, memory_k, truth, cfg.gains);
      rec.V1 = v.V1;
      rec.V2 = v.V2;
      rec.V3 = v.V3;
    } else {
      rec.V1 = 0.5 * servo.errors.delta1.squaredNorm() + 0.5 * servo.errors.delta2 * servo.errors.delta2;
      rec.V2 = rec.V1 + 0.5 * servo.errors.delta3.squaredNorm();
      rec.V3 = std::numeric_limits<double>::quiet_NaN();
    }
    rec.noisy = cfg.noise.enabled;
    result.records.push_back(rec);
    result.commanded_visibility_margin.push_back(
        margin_bound - std::abs(obs->b_inertial.dot(alloc.command.R_des.z_axis())));

    try {
      for (int s = 0; s < substeps; ++s) {
        if (cfg.actuation == ActuationModel::kIdealAcceleration) {
          world = step_with_acceleration(world, servo.control.u, alloc.command.omega, dt_physics);
        } else {
          world = step(world, {alloc.command.thrust, alloc.command.omega}, dt_physics, cfg.vehicle);
        }
      }
    } catch (const Error& e) {
      return fault(RunStatus::kNonFiniteState, e.what());
    }
    if (!servo.control.u.allFinite() || !std::isfinite(controller.memory().r_hat)) {
      return fault(RunStatus::kNonFiniteState, "controller produced a non-finite command");
    }
  }
  return result;
}

std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, unsigned threads) {
  std::vector<RunResult> results(configs.size());
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run(configs[i]);
      } catch (const Error& e) {
        results[i].status = RunStatus::kConfigInvalid;
        results[i].fault_message = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  return results;
}

ScenarioConfig paper_scenario() {
  ScenarioConfig cfg;
  cfg.initial.vehicle.position = Vec3(0.0, 0.0, -1.8);
  cfg.initial.vehicle.velocity = Vec3::Zero();
  cfg.initial.vehicle.attitude = Rotation3::identity();
  cfg.initial.target.position = Vec3(3.0, 0.1, -1.0);
  cfg.initial.target.velocity = Vec3::Zero();
  cfg.initial.target.acceleration = Vec3(-0.01, 0.01, 0.0);
  cfg.target_radius = 0.25;
  cfg.reference.bearing = UnitVector3(-1.0, 0.001, 0.0);
  cfg.reference.theta = 0.125;
  cfg.gains.k1 = 0.4;
  cfg.gains.k2 = 1.2;
  cfg.gains.K3 = 0.7 * Mat3::Identity();
  cfg.gains.K_R = 5.0 * Mat3::Identity();
  cfg.gains.K_rho = 1e-4 * Mat3::Identity();
  cfg.gains.k_r = 0.1;
  cfg.gains.include_wd_dot = false;
  cfg.observers.r_hat = 1.0;
  cfg.observers.rho_hat = Vec3::Zero();
  cfg.noise.enabled = true;
  cfg.noise.bearing_angle_std_deg = 1.0;
  cfg.noise.theta_std_deg = 1e-4;
  cfg.noise.rng_seed = 1;
  cfg.visibility.varphi = 75.0 * std::numbers::pi / 180.0;
  cfg.vehicle.mass = 1.0;
  cfg.vehicle.gravity = 9.8;
  cfg.vehicle.max_thrust = 34.0;
  cfg.dt_physics = 1e-3;
  cfg.dt_control = 1e-3;
  cfg.duration = 120.0;
  return cfg;
}

DiagnosticSeries diagnostics(std::span<const LogRecord> records, const TrackingTruth& truth,
                             const VisibilityConfig& vis) {
  DiagnosticSeries out;
  const double bound = std::cos(vis.varphi);
  const Vec3 rho = truth.target_acceleration / truth.radius;
  out.min_visibility_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LogRecord& r = records[i];
    out.r_tilde.push_back(truth.radius - r.r_hat);
    out.rho_tilde.push_back(rho - r.rho_hat);
    const double margin = bound - std::abs(r.b.dot(r.R.col(2)));
    out.visibility_margin.push_back(margin);
    out.min_visibility_margin = std::min(out.min_visibility_margin, margin);
    if (i + 1 < records.size()) {
      out.V3_rate.push_back((records[i + 1].V3 - r.V3) / (records[i + 1].t - r.t));
    }
  }
  return out;
}

}  // namespace sphere_servo
