#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapse/oscillator.hpp"
#include "collapse/trajectory.hpp"

namespace collapse {

enum class RunMode { simulate, ensemble, reconstruct, oscillator, mpp, freeze, kernel, dualaxis };

std::string to_string(RunMode mode);

struct EmitSet {
  bool trajectory = false;
  bool reconstruction = false;
  bool stats = false;
  bool plotdata = false;
};

struct RunConfig {
  RunMode mode = RunMode::simulate;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string in_path;  // reconstruct mode input
  double dt = 1e-3;
  double tau = 1.0;
  double t_max = 0.0;  // 0 = default 50 tau
  int dimension = 0;   // --n, cross-checked against state and lambda lengths
  Eigen::VectorXd lambdas;
  Eigen::VectorXcd initial_amplitudes;
  int ensemble_size = 0;  // --runs
  int threads = 0;  // 0 = hardware, still capped by COLLAPSE_LAB_THREADS
  // oscillator grid
  double x0 = 0.0;
  double grid_xmin = 0.0;
  double grid_dx = 0.0;
  int grid_points = 0;
  double mass = 1.0;
  double omega = 1.0;
  // most probable path
  double z_f = 0.0;
  double epsilon = 0.0;
  double duration = 1.0;
  EmitSet emit;
  std::vector<std::string> warnings;  // non-fatal (weak-regime etc.)

  double effective_t_max() const { return t_max > 0.0 ? t_max : 50.0 * tau; }
  GaussianMeasurementConfig measurement_config() const;
  nlohmann::ordered_json echo() const;  // full config echo for file headers
};

// argv without the program name. A JSON file passed with --config supplies
// defaults for any flag not given on the command line; explicit flags win.
// Throws UnknownFlag / InvalidValue naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

// Worker cap from the environment, 0 when unset.
int env_thread_cap();

// JSON-lines trajectory file: header object first, then one row per sample
// with fixed field order t, re, im, r, dH. Doubles are shortest round-trip.
std::string serialize_trajectory(const TrajectoryRecord& record,
                                 const nlohmann::ordered_json& config_echo);
void write_trajectory(const TrajectoryRecord& record,
                      const nlohmann::ordered_json& config_echo,
                      const std::string& path);

struct TrajectoryFile {
  nlohmann::ordered_json header;
  TrajectoryRecord record;
};

TrajectoryFile read_trajectory(const std::string& path);

// Outcome histogram then mean-population series as CSV (config echo in a
// leading comment line), plus a JSON sidecar <path>.summary.json.
std::string serialize_stats_csv(const EnsembleStats& stats,
                                const nlohmann::ordered_json& config_echo);
std::string serialize_stats_sidecar(const EnsembleStats& stats,
                                    const nlohmann::ordered_json& config_echo);
void write_stats(const EnsembleStats& stats, const nlohmann::ordered_json& config_echo,
                 const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Shortest round-trip decimal form of a double (same encoder as the JSON
// output, reused for CSV cells).
std::string format_double(double x);

}  // namespace collapse
