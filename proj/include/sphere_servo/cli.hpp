#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sphere_servo/sim_harness.hpp"

namespace sphere_servo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeFault = 3;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "SPHERE_SERVO_OUTPUT_ROOT";

struct RunOptions {
  std::string scenario = "paper";  // "paper" or a JSON file
  std::string output_dir;          // empty: <output root>/<scenario stem>
  std::optional<std::uint64_t> seed;
  std::optional<bool> noise;
  std::optional<bool> include_wd_dot;
  std::optional<double> duration;
  std::optional<double> dt;  // sets dt_physics and dt_control together
  std::optional<double> dt_physics;
  std::optional<double> dt_control;
  bool plot = false;
};

struct SweepOptions {
  std::string scenario = "paper";
  std::string grid;
  std::string output_dir;
  unsigned threads = 0;
};

/// $SPHERE_SERVO_OUTPUT_ROOT, or "runs" when unset or empty.
std::filesystem::path default_output_root();

/// Base scenario plus option overrides, validated. Throws kConfigInvalid.
ScenarioConfig resolve_scenario(const RunOptions& opts);

std::filesystem::path resolve_output_dir(const std::string& requested, const std::string& scenario);

/// One line of final errors and the smallest visibility margins.
std::string run_summary(const RunResult& result, const ScenarioConfig& cfg);

/// Final ||delta1||, |delta2| and ||delta3|| all below 1e-2 on a completed run.
bool converged(const RunResult& result);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& csv_path, const std::string& output_dir, std::ostream& out,
             std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

/// Parses `run`, `plot` and `sweep` subcommands and dispatches.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sphere_servo::cli
