#include "collapse/io.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "collapse/errors.hpp"

namespace collapse {

using ordered_json = nlohmann::ordered_json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::simulate: return "simulate";
    case RunMode::ensemble: return "ensemble";
    case RunMode::reconstruct: return "reconstruct";
    case RunMode::oscillator: return "oscillator";
    case RunMode::mpp: return "mpp";
    case RunMode::freeze: return "freeze";
    case RunMode::kernel: return "kernel";
    case RunMode::dualaxis: return "dualaxis";
  }
  return "unknown";
}

std::string format_double(double x) { return nlohmann::json(x).dump(); }

namespace {

std::complex<double> parse_complex_token(const std::string& token) {
  const auto bad = [&] { return InvalidValue("cannot parse amplitude '" + token + "'"); };
  if (token.empty()) throw bad();
  auto to_double = [&](const std::string& s) {
    if (s.empty() || s == "+" || s == "-") {
      // bare sign in front of 'i'
      return s == "-" ? -1.0 : 1.0;
    }
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != s.size()) throw bad();
    return v;
  };
  if (token.back() != 'i') return {to_double(token), 0.0};
  const std::string body = token.substr(0, token.size() - 1);
  // Split at the last +/- that is not a leading sign or exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') &&
        body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

Eigen::VectorXcd parse_state_spec(const std::string& spec) {
  if (spec == "plus") {
    Eigen::VectorXcd v(2);
    v << 1.0, 1.0;
    return v / std::sqrt(2.0);
  }
  if (spec == "zero") {
    Eigen::VectorXcd v(2);
    v << 1.0, 0.0;
    return v;
  }
  if (spec == "one") {
    Eigen::VectorXcd v(2);
    v << 0.0, 1.0;
    return v;
  }
  std::vector<std::complex<double>> amps;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) amps.push_back(parse_complex_token(token));
  if (amps.size() < 2) throw InvalidValue("state needs at least two amplitudes");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v[static_cast<Eigen::Index>(i)] = amps[i];
  if (v.norm() == 0.0) throw InvalidValue("state vector is zero");
  return v / v.norm();
}

Eigen::VectorXd parse_double_list(const std::string& spec, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(token, &used));
      if (used != token.size()) throw InvalidValue("");
    } catch (const std::exception&) {
      throw InvalidValue(std::string("cannot parse ") + what + " value '" + token + "'");
    }
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

EmitSet parse_emit(const std::string& spec) {
  EmitSet set;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "trajectory") set.trajectory = true;
    else if (token == "reconstruction") set.reconstruction = true;
    else if (token == "stats") set.stats = true;
    else if (token == "plotdata") set.plotdata = true;
    else throw InvalidValue("unknown emit target '" + token + "'");
  }
  return set;
}

ordered_json json_double_array(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

GaussianMeasurementConfig RunConfig::measurement_config() const {
  GaussianMeasurementConfig cfg;
  cfg.tau = tau;
  cfg.dt = dt;
  cfg.eigenvalues = lambdas;
  return cfg;
}

ordered_json RunConfig::echo() const {
  ordered_json j;
  j["mode"] = to_string(mode);
  j["seed"] = seed;
  j["dt"] = dt;
  j["tau"] = tau;
  j["t_max"] = effective_t_max();
  if (lambdas.size() > 0) j["lambda"] = json_double_array(lambdas);
  if (initial_amplitudes.size() > 0) {
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (Eigen::Index i = 0; i < initial_amplitudes.size(); ++i) {
      re.push_back(initial_amplitudes[i].real());
      im.push_back(initial_amplitudes[i].imag());
    }
    j["state_re"] = re;
    j["state_im"] = im;
  }
  if (mode == RunMode::ensemble) {
    j["runs"] = ensemble_size;
    j["threads"] = threads;
  }
  if (mode == RunMode::oscillator) {
    j["x0"] = x0;
    j["grid_xmin"] = grid_xmin;
    j["grid_dx"] = grid_dx;
    j["grid_points"] = grid_points;
    j["mass"] = mass;
    j["omega"] = omega;
  }
  if (mode == RunMode::mpp) {
    j["z_f"] = z_f;
    j["epsilon"] = epsilon;
    j["duration"] = duration;
  }
  ordered_json emits = ordered_json::array();
  if (emit.trajectory) emits.push_back("trajectory");
  if (emit.reconstruction) emits.push_back("reconstruction");
  if (emit.stats) emits.push_back("stats");
  if (emit.plotdata) emits.push_back("plotdata");
  j["emit"] = emits;
  return j;
}

namespace {

// String form of a config-file value, matching the CLI flag syntax.
std::string file_value_as_flag_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return nlohmann::json(v).dump();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!item.is_number()) {
        throw InvalidValue("config file field '" + key + "': arrays must hold numbers");
      }
      if (!joined.empty()) joined += ",";
      joined += nlohmann::json(item).dump();
    }
    return joined;
  }
  throw InvalidValue("config file field '" + key + "': unsupported value type");
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"continuous collapse trajectory toolbox", "collapse-lab"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, state_spec, lambda_spec, emit_spec;

  // Every value is parsed from text so that config-file entries can reuse
  // the same path; option pointers are kept for presence checks.
  struct Field {
    CLI::App* owner = nullptr;
    CLI::Option* opt = nullptr;
    std::string* text = nullptr;
  };
  std::vector<std::pair<std::string, Field>> fields;
  std::vector<std::unique_ptr<std::string>> storage;

  auto add_text = [&](CLI::App* sub, const std::string& name, const char* help) {
    storage.push_back(std::make_unique<std::string>());
    std::string* slot = storage.back().get();
    Field f;
    f.owner = sub;
    f.text = slot;
    f.opt = sub->add_option("--" + name, *slot, help);
    fields.emplace_back(name, f);
    return f.opt;
  };

  auto add_common = [&](CLI::App* sub, bool with_measurement) {
    sub->add_option("--config", config_path, "JSON file of default flag values");
    add_text(sub, "seed", "base RNG seed");
    add_text(sub, "out", "output path");
    add_text(sub, "dt", "step size");
    add_text(sub, "tau", "measurement timescale");
    add_text(sub, "tmax", "time cap (default 50 tau)");
    add_text(sub, "emit", "comma list: trajectory,reconstruction,stats,plotdata");
    if (with_measurement) {
      add_text(sub, "n", "level count, cross-checked against state and lambda");
      add_text(sub, "state", "initial amplitudes or preset plus/zero/one");
      add_text(sub, "lambda", "pointer values, comma separated");
    }
  };

  CLI::App* simulate = app.add_subcommand("simulate", "single trajectory");
  add_common(simulate, true);
  CLI::App* ensemble = app.add_subcommand("ensemble", "many trajectories, aggregated");
  add_common(ensemble, true);
  add_text(ensemble, "runs", "trajectory count");
  add_text(ensemble, "threads", "worker threads (0 = hardware)");
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "attach dH to a trajectory file");
  add_common(reconstruct, false);
  add_text(reconstruct, "in", "input trajectory file");
  CLI::App* oscillator = app.add_subcommand("oscillator", "monitored packet on a grid");
  add_common(oscillator, false);
  add_text(oscillator, "x0", "packet centre");
  add_text(oscillator, "grid-min", "grid start");
  add_text(oscillator, "grid-dx", "grid spacing");
  add_text(oscillator, "grid-points", "grid size");
  add_text(oscillator, "mass", "packet mass");
  add_text(oscillator, "omega", "trap frequency");
  CLI::App* mpp = app.add_subcommand("mpp", "most probable path and effective Hamiltonian");
  add_common(mpp, false);
  add_text(mpp, "zf", "target z at t = duration");
  add_text(mpp, "epsilon", "Larmor drive");
  add_text(mpp, "duration", "boundary time");
  CLI::App* freeze = app.add_subcommand("freeze", "measurement with counter-rotation feedback");
  add_common(freeze, true);
  CLI::App* kernel = app.add_subcommand("kernel", "equivalence-class generators for a state");
  add_common(kernel, true);
  CLI::App* dualaxis = app.add_subcommand("dualaxis", "alternating z/x monitoring");
  add_common(dualaxis, true);

  std::vector<const char*> argv;
  argv.push_back("collapse-lab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* scope = &app;
    while (!scope->get_subcommands().empty()) scope = scope->get_subcommands().front();
    throw HelpRequested(scope->help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ExtrasError& e) {
    throw UnknownFlag(e.what());
  } catch (const CLI::ParseError& e) {
    throw InvalidValue(e.what());
  }

  CLI::App* active = nullptr;
  if (simulate->parsed()) { cfg.mode = RunMode::simulate; active = simulate; }
  else if (ensemble->parsed()) { cfg.mode = RunMode::ensemble; active = ensemble; }
  else if (reconstruct->parsed()) { cfg.mode = RunMode::reconstruct; active = reconstruct; }
  else if (oscillator->parsed()) { cfg.mode = RunMode::oscillator; active = oscillator; }
  else if (mpp->parsed()) { cfg.mode = RunMode::mpp; active = mpp; }
  else if (freeze->parsed()) { cfg.mode = RunMode::freeze; active = freeze; }
  else if (kernel->parsed()) { cfg.mode = RunMode::kernel; active = kernel; }
  else if (dualaxis->parsed()) { cfg.mode = RunMode::dualaxis; active = dualaxis; }

  // File values fill any flag the command line left empty.
  if (!config_path.empty()) {
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(read_text_file(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidValue("config file '" + config_path + "': " + e.what());
    }
    if (!file.is_object()) {
      throw InvalidValue("config file '" + config_path + "' must hold a JSON object");
    }
    for (const auto& [key, value] : file.items()) {
      bool known = false;
      for (auto& [name, field] : fields) {
        if (name != key || field.owner != active) continue;
        known = true;
        if (field.opt->count() == 0) *field.text = file_value_as_flag_text(value, key);
        break;
      }
      if (!known) throw InvalidValue("config file field '" + key + "' is not a flag of this mode");
    }
  }

  auto text_of = [&](const std::string& name) -> const std::string& {
    for (auto& [n, field] : fields) {
      if (n == name && field.owner == active) return *field.text;
    }
    static const std::string empty;
    return empty;
  };
  auto has = [&](const std::string& name) { return !text_of(name).empty(); };
  auto as_double = [&](const std::string& name, double fallback) {
    const std::string& s = text_of(name);
    if (s.empty()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw InvalidValue("");
      return v;
    } catch (const std::exception&) {
      throw InvalidValue("--" + name + ": cannot parse '" + s + "' as a number");
    }
  };
  auto as_int = [&](const std::string& name, long long fallback) {
    const std::string& s = text_of(name);
    if (s.empty()) return fallback;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw InvalidValue("");
      return v;
    } catch (const std::exception&) {
      throw InvalidValue("--" + name + ": cannot parse '" + s + "' as an integer");
    }
  };

  if (has("seed")) {
    const std::string& s = text_of("seed");
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(s, &used);
      if (used != s.size()) throw InvalidValue("");
    } catch (const std::exception&) {
      throw InvalidValue("--seed: cannot parse '" + s + "' as an unsigned integer");
    }
  }
  cfg.out_path = text_of("out");
  cfg.dt = as_double("dt", cfg.dt);
  cfg.tau = as_double("tau", cfg.tau);
  cfg.t_max = as_double("tmax", cfg.t_max);
  emit_spec = text_of("emit");
  if (!(cfg.dt > 0.0)) throw InvalidValue("--dt must be positive");
  if (!(cfg.tau > 0.0)) throw InvalidValue("--tau must be positive");
  if (cfg.t_max < 0.0) throw InvalidValue("--tmax must be non-negative");
  const bool steps_in_time = cfg.mode != RunMode::reconstruct &&
                             cfg.mode != RunMode::kernel && cfg.mode != RunMode::mpp;
  if (steps_in_time && cfg.dt / cfg.tau > 0.1) {
    cfg.warnings.push_back("dt/tau > 0.1: outside the weak-measurement regime");
  }

  const bool with_measurement =
      cfg.mode == RunMode::simulate || cfg.mode == RunMode::ensemble ||
      cfg.mode == RunMode::freeze || cfg.mode == RunMode::kernel ||
      cfg.mode == RunMode::dualaxis;
  if (with_measurement) {
    cfg.dimension = static_cast<int>(as_int("n", 0));
    state_spec = text_of("state");
    lambda_spec = text_of("lambda");
    const bool needs_lambda = cfg.mode != RunMode::kernel;
    if (needs_lambda && lambda_spec.empty()) {
      throw InvalidValue("--lambda is required for this mode");
    }
    if (!lambda_spec.empty()) {
      cfg.lambdas = parse_double_list(lambda_spec, "lambda");
      if (cfg.lambdas.size() < 2) throw InvalidValue("--lambda needs at least two values");
      if (needs_lambda && cfg.lambdas.minCoeff() == cfg.lambdas.maxCoeff()) {
        throw InvalidValue("--lambda values must not all coincide");
      }
    }
    if (!state_spec.empty()) {
      cfg.initial_amplitudes = parse_state_spec(state_spec);
    } else if (cfg.lambdas.size() > 0 || cfg.dimension >= 2) {
      const Eigen::Index n =
          cfg.lambdas.size() > 0 ? cfg.lambdas.size() : Eigen::Index(cfg.dimension);
      cfg.initial_amplitudes =
          Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
    } else {
      throw InvalidValue("--state is required when neither --lambda nor --n fixes the size");
    }
    if (cfg.lambdas.size() > 0 && cfg.lambdas.size() != cfg.initial_amplitudes.size()) {
      throw InvalidValue("--state and --lambda must have the same length");
    }
    if (cfg.dimension > 0 && cfg.dimension != cfg.initial_amplitudes.size()) {
      throw InvalidValue("--n does not match the state length");
    }
  }
  if (cfg.mode == RunMode::ensemble) {
    if (!has("runs")) throw InvalidValue("--runs is required for ensemble mode");
    cfg.ensemble_size = static_cast<int>(as_int("runs", 0));
    if (cfg.ensemble_size < 1) throw InvalidValue("--runs must be at least 1");
    cfg.threads = static_cast<int>(as_int("threads", 0));
    if (cfg.threads < 0) throw InvalidValue("--threads must be non-negative");
  }
  if (cfg.mode == RunMode::reconstruct) {
    cfg.in_path = text_of("in");
    if (cfg.in_path.empty()) throw InvalidValue("--in is required for reconstruct mode");
  }
  if (cfg.mode == RunMode::oscillator) {
    cfg.x0 = as_double("x0", 0.0);
    cfg.grid_xmin = as_double("grid-min", 0.0);
    cfg.grid_dx = as_double("grid-dx", 0.0);
    cfg.grid_points = static_cast<int>(as_int("grid-points", 0));
    cfg.mass = as_double("mass", 1.0);
    cfg.omega = as_double("omega", 1.0);
    if (!has("grid-dx") || !(cfg.grid_dx > 0.0)) {
      throw InvalidValue("--grid-dx must be given and positive");
    }
    if (cfg.grid_points < 64) throw InvalidValue("--grid-points must be at least 64");
  }
  if (cfg.mode == RunMode::mpp) {
    if (!has("zf")) throw InvalidValue("--zf is required for mpp mode");
    cfg.z_f = as_double("zf", 0.0);
    cfg.epsilon = as_double("epsilon", 0.0);
    cfg.duration = as_double("duration", 1.0);
    if (!(cfg.duration > 0.0)) throw InvalidValue("--duration must be positive");
    if (std::abs(cfg.z_f) >= 1.0) throw InvalidValue("--zf must lie strictly inside (-1, 1)");
  }
  if (cfg.mode == RunMode::kernel && state_spec.empty()) {
    throw InvalidValue("--state is required for kernel mode");
  }

  if (!emit_spec.empty()) {
    cfg.emit = parse_emit(emit_spec);
  } else {
    switch (cfg.mode) {
      case RunMode::simulate:
      case RunMode::freeze:
      case RunMode::dualaxis:
        cfg.emit.trajectory = true;
        break;
      case RunMode::ensemble:
        cfg.emit.stats = true;
        break;
      case RunMode::reconstruct:
        cfg.emit.reconstruction = true;
        break;
      case RunMode::oscillator:
      case RunMode::mpp:
      case RunMode::kernel:
        cfg.emit.plotdata = true;
        break;
    }
  }
  return cfg;
}

int env_thread_cap() {
  const char* raw = std::getenv("COLLAPSE_LAB_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) {
    throw InvalidValue("COLLAPSE_LAB_THREADS must be a positive integer");
  }
  return static_cast<int>(v);
}

std::string serialize_trajectory(const TrajectoryRecord& record,
                                 const ordered_json& config_echo) {
  std::string out;
  ordered_json header;
  header["schema"] = "collapse-lab/1";
  header["seed"] = record.seed;
  header["config"] = config_echo;
  out += header.dump();
  out += '\n';
  const bool with_dh = record.reconstructions.size() == record.samples.size();
  for (std::size_t k = 0; k < record.samples.size(); ++k) {
    const TrajectorySample& s = record.samples[k];
    ordered_json row;
    row["t"] = s.t;
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (Eigen::Index i = 0; i < s.state.amplitudes.size(); ++i) {
      re.push_back(s.state.amplitudes[i].real());
      im.push_back(s.state.amplitudes[i].imag());
    }
    row["re"] = re;
    row["im"] = im;
    if (s.readout) row["r"] = s.readout->r;
    else row["r"] = nullptr;
    if (with_dh) row["dH"] = record.reconstructions[k].energy_uncertainty;
    else row["dH"] = nullptr;
    out += row.dump();
    out += '\n';
  }
  return out;
}

void write_trajectory(const TrajectoryRecord& record, const ordered_json& config_echo,
                      const std::string& path) {
  write_text_file(path, serialize_trajectory(record, config_echo));
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("trajectory file is empty: " + path);
  TrajectoryFile file;
  try {
    file.header = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad trajectory header: ") + e.what());
  }
  file.record.seed = file.header.value("seed", std::uint64_t{0});
  bool all_dh = true;
  std::vector<double> dh_values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json row;
    try {
      row = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("bad trajectory row: ") + e.what());
    }
    TrajectorySample sample;
    sample.t = row.at("t").get<double>();
    const auto& re = row.at("re");
    const auto& im = row.at("im");
    if (re.size() != im.size()) throw IoError("trajectory row with mismatched re/im");
    sample.state.amplitudes.resize(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) {
      sample.state.amplitudes[static_cast<Eigen::Index>(i)] =
          std::complex<double>(re[i].get<double>(), im[i].get<double>());
    }
    if (!row.at("r").is_null()) {
      sample.readout = Readout{row.at("r").get<double>(), sample.t};
      file.record.readouts.push_back(*sample.readout);
    }
    if (!row.at("dH").is_null()) dh_values.push_back(row.at("dH").get<double>());
    else all_dh = false;
    file.record.samples.push_back(std::move(sample));
  }
  if (all_dh && dh_values.size() == file.record.samples.size()) {
    file.record.reconstructions.resize(dh_values.size());
    for (std::size_t i = 0; i < dh_values.size(); ++i) {
      file.record.reconstructions[i].energy_uncertainty = dh_values[i];
    }
  }
  return file;
}

std::string serialize_stats_csv(const EnsembleStats& stats,
                                const ordered_json& config_echo) {
  ordered_json header;
  header["schema"] = "collapse-lab/1";
  header["seed"] = stats.base_seed;
  header["config"] = config_echo;
  std::string out = "# " + header.dump() + "\n";
  out += "outcome_index,count,frequency\n";
  // Frequencies are relative among collapsed runs, so they sum to one even
  // when some trajectories hit t_max unresolved.
  const long collapsed = stats.n_trajectories - stats.unresolved;
  for (std::size_t i = 0; i < stats.outcome_counts.size(); ++i) {
    const double freq = collapsed > 0 ? static_cast<double>(stats.outcome_counts[i]) /
                                            static_cast<double>(collapsed)
                                      : 0.0;
    out += std::to_string(i) + "," + std::to_string(stats.outcome_counts[i]) + "," +
           format_double(freq) + "\n";
  }
  out += "\ntime";
  for (std::size_t i = 0; i < stats.outcome_counts.size(); ++i) {
    out += ",mean_pop_" + std::to_string(i);
  }
  out += "\n";
  for (std::size_t s = 0; s < stats.times.size(); ++s) {
    out += format_double(stats.times[s]);
    const Eigen::VectorXd& pops = stats.mean_populations[s];
    for (Eigen::Index i = 0; i < pops.size(); ++i) out += "," + format_double(pops[i]);
    out += "\n";
  }
  return out;
}

std::string serialize_stats_sidecar(const EnsembleStats& stats,
                                    const ordered_json& config_echo) {
  ordered_json j;
  j["mean_collapse_time"] = stats.mean_collapse_time;
  j["n_trajectories"] = stats.n_trajectories;
  j["seed"] = stats.base_seed;
  j["config"] = config_echo;
  return j.dump() + "\n";
}

void write_stats(const EnsembleStats& stats, const ordered_json& config_echo,
                 const std::string& path) {
  write_text_file(path, serialize_stats_csv(stats, config_echo));
  write_text_file(path + ".summary.json", serialize_stats_sidecar(stats, config_echo));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace collapse
