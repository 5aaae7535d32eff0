#include "sphere_servo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sphere_servo/error.hpp"
#include "sphere_servo/plot.hpp"
#include "sphere_servo/scenario_io.hpp"
#include "sphere_servo/trajectory_csv.hpp"

namespace sphere_servo::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kConvergenceBand = 1e-2;

ScenarioConfig load_base(const std::string& scenario) {
  if (scenario == "paper") return paper_scenario();
  return load_scenario_file(scenario);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  os << text;
}

void write_run_artifacts(const fs::path& dir, const ScenarioConfig& cfg, const RunResult& result) {
  write_text(dir / "config.resolved.json", scenario_to_json(cfg).dump(2) + "\n");
  write_csv_file((dir / "trajectory.csv").string(), result.records);
}

void write_plots(const fs::path& dir, const std::vector<LogRecord>& records) {
  write_text(dir / "trajectory.svg", trajectory_svg(records));
  write_text(dir / "errors.svg", error_series_svg(records));
}

double min_of(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct GridAxis {
  std::string path;
  std::vector<json> values;
};

std::vector<GridAxis> load_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kConfigInvalid, path + ": cannot open grid file");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array()) {
    throw Error(ErrorCode::kConfigInvalid, "grid: expected an object with a \"parameters\" array");
  }
  std::vector<GridAxis> axes;
  for (const json& entry : doc["parameters"]) {
    if (!entry.is_object() || !entry.contains("path") || !entry["path"].is_string() ||
        !entry.contains("values") || !entry["values"].is_array() || entry["values"].empty()) {
      throw Error(ErrorCode::kConfigInvalid,
                  "grid.parameters: each entry needs a string \"path\" and a non-empty \"values\" array");
    }
    axes.push_back({entry["path"].get<std::string>(), entry["values"].get<std::vector<json>>()});
  }
  return axes;
}

}  // namespace

fs::path default_output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  if (env != nullptr && *env != '\0') return env;
  return "runs";
}

fs::path resolve_output_dir(const std::string& requested, const std::string& scenario) {
  if (!requested.empty()) return requested;
  const std::string stem = scenario == "paper" ? "paper" : fs::path(scenario).stem().string();
  return default_output_root() / stem;
}

ScenarioConfig resolve_scenario(const RunOptions& opts) {
  ScenarioConfig cfg = load_base(opts.scenario);
  if (opts.seed) cfg.noise.rng_seed = *opts.seed;
  if (opts.noise) cfg.noise.enabled = *opts.noise;
  if (opts.include_wd_dot) cfg.gains.include_wd_dot = *opts.include_wd_dot;
  if (opts.duration) cfg.duration = *opts.duration;
  if (opts.dt) cfg.dt_physics = cfg.dt_control = *opts.dt;
  if (opts.dt_physics) cfg.dt_physics = *opts.dt_physics;
  if (opts.dt_control) cfg.dt_control = *opts.dt_control;
  cfg.validate();
  return cfg;
}

bool converged(const RunResult& result) {
  if (!result.completed() || result.records.empty()) return false;
  const LogRecord& last = result.records.back();
  return last.delta1.norm() < kConvergenceBand && std::abs(last.delta2) < kConvergenceBand &&
         last.delta3.norm() < kConvergenceBand;
}

std::string run_summary(const RunResult& result, const ScenarioConfig& cfg) {
  if (result.records.empty()) {
    return fmt::format("status={} steps=0\n", to_string(result.status));
  }
  const LogRecord& last = result.records.back();
  const DiagnosticSeries diag =
      diagnostics(result.records, {cfg.target_radius, cfg.initial.target.acceleration}, cfg.visibility);
  return fmt::format(
      "status={} steps={} t_end={:.6g}\n"
      "final |delta1|={:.6e} |delta2|={:.6e} |delta3|={:.6e}\n"
      "final r_hat={:.6g} rho_hat=[{:.6g}, {:.6g}, {:.6g}]\n"
      "min visibility margin: commanded={:.6e} body={:.6e}\n",
      to_string(result.status), result.records.size(), last.t, last.delta1.norm(),
      std::abs(last.delta2), last.delta3.norm(), last.r_hat, last.rho_hat.x(), last.rho_hat.y(),
      last.rho_hat.z(), min_of(result.commanded_visibility_margin), diag.min_visibility_margin);
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  fs::path dir;
  try {
    cfg = resolve_scenario(opts);
    dir = resolve_output_dir(opts.output_dir, opts.scenario);
    fs::create_directories(dir);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "config error: output directory: " << e.what() << "\n";
    return kExitConfigError;
  }

  const RunResult result = run(cfg);
  try {
    write_run_artifacts(dir, cfg, result);
    if (opts.plot) write_plots(dir, result.records);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (!result.completed()) {
    err << "runtime fault: " << to_string(result.status) << ": " << result.fault_message << "\n";
    return kExitRuntimeFault;
  }
  out << run_summary(result, cfg);
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& output_dir, std::ostream& out,
             std::ostream& err) {
  std::vector<LogRecord> records;
  try {
    records = read_csv_file(csv_path);
  } catch (const Error& e) {
    err << "plot error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const fs::path dir = output_dir.empty() ? fs::path(csv_path).parent_path() : fs::path(output_dir);
  try {
    if (!dir.empty()) fs::create_directories(dir);
    write_plots(dir.empty() ? fs::path(".") : dir, records);
  } catch (const std::exception& e) {
    err << "plot error: " << e.what() << "\n";
    return kExitConfigError;
  }
  out << "wrote trajectory.svg and errors.svg (" << records.size() << " records)\n";
  return kExitOk;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig base;
  std::vector<GridAxis> axes;
  fs::path root;
  try {
    base = load_base(opts.scenario);
    axes = load_grid(opts.grid);
    root = opts.output_dir.empty() ? default_output_root() / "sweep" : fs::path(opts.output_dir);
    fs::create_directories(root);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "config error: output directory: " << e.what() << "\n";
    return kExitConfigError;
  }

  json base_doc = scenario_to_json(base);
  if (!base.lowpass_cutoff_hz) base_doc["lowpass_cutoff_hz"] = nullptr;

  std::size_t cells = 1;
  for (const GridAxis& a : axes) cells *= a.values.size();
  const int width = std::max<int>(3, static_cast<int>(std::to_string(cells).size()));

  struct Cell {
    std::string id;
    std::vector<std::string> values;
    std::optional<ScenarioConfig> cfg;
    std::string config_error;
  };
  std::vector<Cell> grid(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    Cell& cell = grid[i];
    cell.id = fmt::format("cell_{:0{}}", i, width);
    json doc = base_doc;
    std::size_t rest = i;
    try {
      // Last axis varies fastest.
      std::vector<std::size_t> index(axes.size());
      for (std::size_t a = axes.size(); a-- > 0;) {
        index[a] = rest % axes[a].values.size();
        rest /= axes[a].values.size();
      }
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const json& v = axes[a].values[index[a]];
        cell.values.push_back(v.dump());
        set_json_path(doc, axes[a].path, v);
      }
      cell.cfg = scenario_from_json(doc, base);
    } catch (const Error& e) {
      cell.config_error = e.what();
    }
  }

  std::vector<ScenarioConfig> valid;
  std::vector<std::size_t> valid_index;
  for (std::size_t i = 0; i < cells; ++i) {
    if (grid[i].cfg) {
      valid.push_back(*grid[i].cfg);
      valid_index.push_back(i);
    }
  }

  std::ostringstream summary;
  summary << "cell";
  for (const GridAxis& a : axes) summary << ',' << csv_field(a.path);
  summary << ",status,final_delta1,final_delta2,final_delta3,converged,fault\n";
  std::vector<std::string> rows(cells);

  auto row = [&](const Cell& cell, std::string_view status, const LogRecord* last, bool ok,
                 const std::string& fault) {
    std::string r = cell.id;
    for (const std::string& v : cell.values) r += ',' + csv_field(v);
    r += fmt::format(",{},", status);
    if (last != nullptr) {
      r += format_double(last->delta1.norm()) + ',' + format_double(std::abs(last->delta2)) + ',' +
           format_double(last->delta3.norm());
    } else {
      r += ",,";
    }
    r += ok ? ",true," : ",false,";
    r += csv_field(fault);
    return r + "\n";
  };

  try {
    for (std::size_t i = 0; i < cells; ++i) {
      if (grid[i].cfg) continue;
      const fs::path dir = root / grid[i].id;
      fs::create_directories(dir);
      write_text(dir / "error.txt", grid[i].config_error + "\n");
      rows[i] = row(grid[i], to_string(RunStatus::kConfigInvalid), nullptr, false, grid[i].config_error);
    }

    // Bounded batches keep at most one batch of logs in memory.
    const std::size_t batch =
        std::max<std::size_t>(1, opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < valid.size(); start += batch) {
      const std::size_t n = std::min(batch, valid.size() - start);
      const std::vector<RunResult> results =
          run_batch(std::span<const ScenarioConfig>(valid).subspan(start, n), opts.threads);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = valid_index[start + j];
        const RunResult& res = results[j];
        const fs::path dir = root / grid[i].id;
        fs::create_directories(dir);
        write_run_artifacts(dir, valid[start + j], res);
        rows[i] = row(grid[i], to_string(res.status), res.records.empty() ? nullptr : &res.records.back(),
                      converged(res), res.fault_message);
      }
    }
    for (const std::string& r : rows) summary << r;
    write_text(root / "summary.csv", summary.str());
  } catch (const std::exception& e) {
    err << "sweep error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::size_t n_converged = 0;
  for (const std::string& r : rows) n_converged += r.find(",true,") != std::string::npos;
  out << cells << " cells, " << n_converged << " converged\n";
  return kExitOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual-servo tracking of a spherical target: simulate, plot, sweep"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  run_cmd->add_option("--scenario", run_opts.scenario, "\"paper\" or a scenario JSON file");
  run_cmd->add_option("--out", run_opts.output_dir, "Output directory");
  run_cmd->add_option("--seed", run_opts.seed, "Noise seed override");
  run_cmd->add_flag("--noise,!--no-noise", run_opts.noise, "Enable or disable measurement noise");
  run_cmd->add_flag("--include-wd-dot,!--no-wd-dot", run_opts.include_wd_dot,
                    "Feed the w_d rate forward in the control law");
  run_cmd->add_option("--duration", run_opts.duration, "Simulated time [s]");
  run_cmd->add_option("--dt", run_opts.dt, "Physics and control period [s]");
  run_cmd->add_option("--dt-physics", run_opts.dt_physics, "Physics period [s]");
  run_cmd->add_option("--dt-control", run_opts.dt_control, "Control period [s]");
  run_cmd->add_flag("--plot", run_opts.plot, "Also write SVG plots");

  std::string csv_path;
  std::string plot_dir;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render SVG plots from a trajectory CSV");
  plot_cmd->add_option("csv", csv_path, "trajectory.csv")->required();
  plot_cmd->add_option("--out", plot_dir, "Output directory (default: next to the CSV)");

  SweepOptions sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid in parallel");
  sweep_cmd->add_option("--scenario", sweep_opts.scenario, "\"paper\" or a scenario JSON file");
  sweep_cmd->add_option("--grid", sweep_opts.grid, "Grid JSON file")->required();
  sweep_cmd->add_option("--out", sweep_opts.output_dir, "Output directory");
  sweep_cmd->add_option("--threads", sweep_opts.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (run_cmd->parsed()) return cmd_run(run_opts, out, err);
  if (plot_cmd->parsed()) return cmd_plot(csv_path, plot_dir, out, err);
  return cmd_sweep(sweep_opts, out, err);
}

}  // namespace sphere_servo::cli
