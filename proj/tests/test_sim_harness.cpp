#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sphere_servo/error.hpp"
#include "sphere_servo/sim_harness.hpp"
#include "sphere_servo/trajectory_csv.hpp"
#include "test_support.hpp"

namespace sphere_servo {
namespace {

ScenarioConfig short_scenario(double duration) {
  ScenarioConfig cfg = paper_scenario();
  cfg.duration = duration;
  return cfg;
}

std::string csv_text(const RunResult& r) {
  std::ostringstream os;
  write_csv(os, r.records);
  return os.str();
}

void expect_invalid(const ScenarioConfig& cfg, const std::string& path) {
  try {
    cfg.validate();
    ADD_FAILURE() << "expected ConfigInvalid for " << path;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos) << e.what();
  }
}

TEST(PaperScenario, Values) {
  const ScenarioConfig cfg = paper_scenario();
  EXPECT_EQ(cfg.target_radius, 0.25);
  EXPECT_EQ(cfg.gains.k1, 0.4);
  EXPECT_EQ(cfg.gains.k2, 1.2);
  EXPECT_EQ(cfg.gains.K3, 0.7 * Mat3::Identity());
  EXPECT_EQ(cfg.gains.K_R, 5.0 * Mat3::Identity());
  EXPECT_EQ(cfg.gains.K_rho, 1e-4 * Mat3::Identity());
  EXPECT_EQ(cfg.gains.k_r, 0.1);
  EXPECT_EQ(cfg.observers.r_hat, 1.0);
  EXPECT_EQ(cfg.observers.rho_hat, Vec3::Zero());
  EXPECT_EQ(cfg.initial.vehicle.position, Vec3(0, 0, -1.8));
  EXPECT_EQ(cfg.initial.target.position, Vec3(3, 0.1, -1.0));
  EXPECT_EQ(cfg.initial.vehicle.velocity, Vec3::Zero());
  EXPECT_EQ(cfg.initial.target.velocity, Vec3::Zero());
  EXPECT_EQ(cfg.initial.target.acceleration, Vec3(-0.01, 0.01, 0));
  EXPECT_LE((cfg.reference.bearing.vec() - Vec3(-1, 0.001, 0).normalized()).norm(), 1e-16);
  EXPECT_EQ(cfg.reference.theta, 0.125);
  EXPECT_NEAR(cfg.visibility.varphi, 75.0 * std::numbers::pi / 180.0, 1e-15);
  EXPECT_EQ(cfg.vehicle.mass, 1.0);
  EXPECT_EQ(cfg.vehicle.max_thrust, 34.0);
  EXPECT_TRUE(cfg.noise.enabled);
  EXPECT_EQ(cfg.noise.bearing_angle_std_deg, 1.0);
  EXPECT_EQ(cfg.noise.theta_std_deg, 1e-4);
  EXPECT_FALSE(cfg.gains.include_wd_dot);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ScenarioConfig, DerivedTiming) {
  ScenarioConfig cfg = paper_scenario();
  EXPECT_EQ(cfg.control_steps(), 120000);
  EXPECT_EQ(cfg.physics_substeps(), 1);
  cfg.dt_physics = 2.5e-4;
  EXPECT_EQ(cfg.physics_substeps(), 4);
  EXPECT_EQ(cfg.resolved_lowpass_cutoff_hz(), 20.0);
  cfg.noise.enabled = false;
  EXPECT_EQ(cfg.resolved_lowpass_cutoff_hz(), 0.0);
  cfg.lowpass_cutoff_hz = 5.0;
  EXPECT_EQ(cfg.resolved_lowpass_cutoff_hz(), 5.0);
}

TEST(ScenarioConfig, ValidationNamesTheField) {
  ScenarioConfig cfg = paper_scenario();
  cfg.dt_physics = 3e-4;
  expect_invalid(cfg, "timing.dt_control");
  cfg = paper_scenario();
  cfg.dt_physics = 2e-3;
  expect_invalid(cfg, "timing.dt_control");
  cfg = paper_scenario();
  cfg.duration = -1.0;
  expect_invalid(cfg, "timing.duration");
  cfg = paper_scenario();
  cfg.target_radius = 0.0;
  expect_invalid(cfg, "target_radius");
  cfg = paper_scenario();
  cfg.gains.K3(0, 0) = -1.0;
  expect_invalid(cfg, "gains.K3");
  cfg = paper_scenario();
  cfg.observers.r_hat = 0.0;
  expect_invalid(cfg, "observers.r_hat");
  cfg = paper_scenario();
  cfg.visibility.varphi = 2.0;
  expect_invalid(cfg, "visibility");
  cfg = paper_scenario();
  cfg.reference.theta = 2.0;
  expect_invalid(cfg, "reference");
  cfg = paper_scenario();
  cfg.vehicle.mass = -1.0;
  expect_invalid(cfg, "vehicle");
  cfg = paper_scenario();
  cfg.lowpass_cutoff_hz = -1.0;
  expect_invalid(cfg, "lowpass_cutoff_hz");
  cfg = paper_scenario();
  cfg.initial.target.position.x() = NAN;
  expect_invalid(cfg, "initial.target");
}

TEST(Run, ZeroDurationGivesEmptyLog) {
  const RunResult r = run(short_scenario(0.0));
  EXPECT_TRUE(r.completed());
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.commanded_visibility_margin.empty());
}

TEST(Run, StartingInsideTheTargetStopsAtStepZero) {
  ScenarioConfig cfg = short_scenario(1.0);
  cfg.initial.vehicle.position = cfg.initial.target.position + Vec3(0.1, 0, 0);
  const RunResult r = run(cfg);
  EXPECT_EQ(r.status, RunStatus::kInsideTarget);
  EXPECT_TRUE(r.records.empty());
  EXPECT_FALSE(r.fault_message.empty());
}

TEST(Run, InvalidConfigurationThrows) {
  ScenarioConfig cfg = short_scenario(1.0);
  cfg.gains.k1 = -1.0;
  testing::expect_code(ErrorCode::kConfigInvalid, [&] { run(cfg); });
}

TEST(Run, SameSeedGivesIdenticalCsv) {
  const ScenarioConfig cfg = short_scenario(2.0);
  const std::string a = csv_text(run(cfg));
  const std::string b = csv_text(run(cfg));
  EXPECT_EQ(a, b);
  ScenarioConfig other = cfg;
  other.noise.rng_seed = 2;
  EXPECT_NE(a, csv_text(run(other)));
}

TEST(Run, RecordsAreOnePerControlStep) {
  ScenarioConfig cfg = short_scenario(0.5);
  cfg.dt_control = 2e-3;
  cfg.dt_physics = 5e-4;
  const RunResult r = run(cfg);
  ASSERT_TRUE(r.completed()) << r.fault_message;
  ASSERT_EQ(r.records.size(), 250U);
  ASSERT_EQ(r.commanded_visibility_margin.size(), 250U);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    EXPECT_DOUBLE_EQ(r.records[k].t, 2e-3 * static_cast<double>(k));
    EXPECT_TRUE(r.records[k].noisy);
  }
  EXPECT_EQ(r.records.front().p_B, cfg.initial.vehicle.position);
  EXPECT_EQ(r.records.front().p_T, cfg.initial.target.position);
  EXPECT_EQ(r.records.front().r_hat, 1.0);
}

TEST(Run, CommandIsHeldOverTheControlPeriod) {
  // Ideal actuation holds u for the whole period, so consecutive records are
  // linked by exact constant-acceleration kinematics.
  ScenarioConfig cfg = short_scenario(0.2);
  cfg.noise.enabled = false;
  cfg.actuation = ActuationModel::kIdealAcceleration;
  cfg.velocity_source = VelocitySource::kGroundTruth;
  cfg.dt_control = 4e-3;
  cfg.dt_physics = 1e-3;
  const RunResult r = run(cfg);
  ASSERT_TRUE(r.completed()) << r.fault_message;
  const double h = cfg.dt_control;
  for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
    const LogRecord& a = r.records[k];
    const LogRecord& b = r.records[k + 1];
    EXPECT_LE((b.v_B - (a.v_B + h * a.u)).norm(), 1e-12);
    EXPECT_LE((b.p_B - (a.p_B + h * a.v_B + 0.5 * h * h * a.u)).norm(), 1e-12);
    const Vec3 a_t = cfg.initial.target.acceleration;
    EXPECT_LE((b.p_T - (a.p_T + h * a.v_T + 0.5 * h * h * a_t)).norm(), 1e-12);
  }
}

TEST(Run, GroundTruthVelocityIsWhatTheControllerSees) {
  ScenarioConfig cfg = short_scenario(0.5);
  cfg.noise.enabled = false;
  cfg.velocity_source = VelocitySource::kGroundTruth;
  const RunResult r = run(cfg);
  ASSERT_TRUE(r.completed()) << r.fault_message;
  for (const LogRecord& rec : r.records) {
    const Vec3 w = (rec.v_T - rec.v_B) / cfg.target_radius;
    EXPECT_LE((rec.delta3 + rec.w_d - w).norm(), 1e-12);
  }
}

TEST(Run, LoggedQuantitiesAreConsistent) {
  ScenarioConfig cfg = short_scenario(1.0);
  cfg.noise.enabled = false;
  const RunResult r = run(cfg);
  ASSERT_TRUE(r.completed()) << r.fault_message;
  for (const LogRecord& rec : r.records) {
    const Vec3 q = rec.p_T - rec.p_B;
    EXPECT_LE((rec.b - q.normalized()).norm(), 1e-12);
    EXPECT_NEAR(q.norm() * std::sin(rec.theta), cfg.target_radius, 1e-12);
    EXPECT_NEAR(rec.x, std::sin(rec.theta), 1e-15);
    EXPECT_LE((rec.delta1 - (rec.b - cfg.reference.bearing.vec())).norm(), 1e-15);
    EXPECT_NEAR(rec.delta2, rec.x - std::sin(0.125), 1e-15);
    EXPECT_LE((rec.u - rec.r_hat * rec.u0).norm(), 1e-12 * (1 + rec.u.norm()));
    EXPECT_GE(rec.T, 0.0);
    EXPECT_LE(rec.T, 34.0);
    EXPECT_NEAR(rec.V2 - rec.V1, 0.5 * rec.delta3.squaredNorm(), 1e-12);
    EXPECT_LE(std::abs(rec.R.determinant() - 1.0), 1e-9);
  }
  for (double m : r.commanded_visibility_margin) EXPECT_GE(m, -1e-9);
}

TEST(RunBatch, MatchesSequentialRunsAndReportsInvalidCells) {
  std::vector<ScenarioConfig> cfgs(4, short_scenario(0.5));
  cfgs[1].noise.rng_seed = 5;
  cfgs[2].gains.K3 = -Mat3::Identity();
  cfgs[3].gains.k1 = 0.8;
  const std::vector<RunResult> batch = run_batch(cfgs, 3);
  ASSERT_EQ(batch.size(), 4U);
  EXPECT_EQ(batch[2].status, RunStatus::kConfigInvalid);
  EXPECT_NE(batch[2].fault_message.find("gains.K3"), std::string::npos);
  for (int i : {0, 1, 3}) EXPECT_EQ(csv_text(batch[i]), csv_text(run(cfgs[i])));
  EXPECT_TRUE(run_batch({}, 0).empty());
}

TEST(Diagnostics, PerfectEstimatesGiveZeroErrors) {
  const TrackingTruth truth{0.25, Vec3(-0.01, 0.01, 0)};
  std::vector<LogRecord> records(3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].t = 0.1 * static_cast<double>(i);
    records[i].r_hat = 0.25;
    records[i].rho_hat = truth.target_acceleration / 0.25;
    records[i].b = Vec3::UnitX();
    records[i].V3 = 1.0 - static_cast<double>(i);
  }
  const DiagnosticSeries d = diagnostics(records, truth, VisibilityConfig{});
  for (double v : d.r_tilde) EXPECT_EQ(v, 0.0);
  for (const Vec3& v : d.rho_tilde) EXPECT_LE(v.norm(), 1e-18);
  ASSERT_EQ(d.V3_rate.size(), 2U);
  EXPECT_NEAR(d.V3_rate[0], -10.0, 1e-12);
  EXPECT_NEAR(d.min_visibility_margin, std::cos(VisibilityConfig{}.varphi), 1e-15);
}

TEST(Diagnostics, MarginUsesBodyAxis) {
  std::vector<LogRecord> records(1);
  records[0].b = Vec3::UnitZ();
  const DiagnosticSeries d = diagnostics(records, {0.25, Vec3::Zero()}, VisibilityConfig{0.5});
  EXPECT_NEAR(d.min_visibility_margin, std::cos(0.5) - 1.0, 1e-15);
  EXPECT_TRUE(d.V3_rate.empty());
}

TEST(RunStatus, Names) {
  EXPECT_EQ(to_string(RunStatus::kCompleted), "Completed");
  EXPECT_EQ(to_string(RunStatus::kInsideTarget), "InsideTarget");
  EXPECT_EQ(to_string(RunStatus::kConfigInvalid), "ConfigInvalid");
}

}  // namespace
}  // namespace sphere_servo
