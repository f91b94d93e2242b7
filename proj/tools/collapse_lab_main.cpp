#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "collapse/control.hpp"
#include "collapse/errors.hpp"
#include "collapse/io.hpp"
#include "collapse/oscillator.hpp"
#include "collapse/reconstruction.hpp"
#include "collapse/trajectory.hpp"

namespace {

using collapse::RunConfig;
using ordered_json = nlohmann::ordered_json;

void emit_text(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) std::cout << text;
  else collapse::write_text_file(cfg.out_path, text);
}

int run_simulate(const RunConfig& cfg) {
  auto meas = cfg.measurement_config();
  collapse::validate(meas);
  const auto initial = collapse::make_level_state(cfg.initial_amplitudes);
  collapse::StopRule stop;
  stop.t_max = cfg.effective_t_max();
  auto record = collapse::run_trajectory(initial, meas, cfg.seed, stop);
  if (cfg.emit.reconstruction) collapse::attach_reconstructions(record);
  emit_text(cfg, collapse::serialize_trajectory(record, cfg.echo()));
  return 0;
}

int run_ensemble_mode(const RunConfig& cfg) {
  auto meas = cfg.measurement_config();
  collapse::validate(meas);
  const auto initial = collapse::make_level_state(cfg.initial_amplitudes);
  collapse::StopRule stop;
  stop.t_max = cfg.effective_t_max();
  int threads = cfg.threads;
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  const int cap = collapse::env_thread_cap();
  if (cap > 0) threads = std::min(threads, cap);
  const auto stats =
      collapse::run_ensemble(initial, meas, cfg.ensemble_size, cfg.seed, stop, threads);
  if (cfg.out_path.empty()) {
    std::cout << collapse::serialize_stats_csv(stats, cfg.echo());
  } else {
    collapse::write_stats(stats, cfg.echo(), cfg.out_path);
  }
  return 0;
}

int run_reconstruct(const RunConfig& cfg) {
  auto file = collapse::read_trajectory(cfg.in_path);
  collapse::attach_reconstructions(file.record);
  ordered_json echo = ordered_json::object();
  if (file.header.contains("config")) echo = file.header["config"];
  emit_text(cfg, collapse::serialize_trajectory(file.record, echo));
  return 0;
}

int run_oscillator(const RunConfig& cfg) {
  collapse::OscillatorRunConfig run;
  run.grid.x_min = cfg.grid_xmin;
  run.grid.dx = cfg.grid_dx;
  run.grid.n_points = cfg.grid_points;
  run.grid.mass = cfg.mass;
  run.grid.omega = cfg.omega;
  run.x0 = cfg.x0;
  run.tau = cfg.tau;
  run.dt = cfg.dt;
  run.t_max = cfg.effective_t_max();
  run.seed = cfg.seed;
  const auto traj = collapse::oscillator_trajectory(run);
  if (traj.truncation_warning) {
    std::cerr << "warning: a readout strayed far from the packet; grid edges may clip\n";
  }
  if (cfg.emit.trajectory) {
    emit_text(cfg, collapse::serialize_trajectory(traj.record, cfg.echo()));
    return 0;
  }
  ordered_json header;
  header["schema"] = "collapse-lab/1";
  header["seed"] = cfg.seed;
  header["config"] = cfg.echo();
  const double dx0_sq = 1.0 / (2.0 * cfg.mass * cfg.omega);
  std::string out = "# " + header.dump() + "\n";
  out += "time,mean_x,variance,variance_law,excess_kurtosis\n";
  for (std::size_t k = 0; k < traj.record.samples.size(); ++k) {
    const double t = traj.record.samples[k].t;
    out += collapse::format_double(t) + "," +
           collapse::format_double(traj.mean_position[k]) + "," +
           collapse::format_double(traj.variance[k]) + "," +
           collapse::format_double(collapse::variance_law(dx0_sq, cfg.tau, t)) + "," +
           collapse::format_double(traj.excess_kurtosis[k]) + "\n";
  }
  emit_text(cfg, out);
  return 0;
}

int run_mpp(const RunConfig& cfg) {
  collapse::MostProbablePathParams p;
  p.z_f = cfg.z_f;
  p.duration = cfg.duration;
  p.epsilon = cfg.epsilon;
  p.tau = cfg.tau;
  collapse::validate(p);
  const double rbar = collapse::mpp_readout(p);
  ordered_json header;
  header["schema"] = "collapse-lab/1";
  header["seed"] = cfg.seed;
  header["config"] = cfg.echo();
  header["readout"] = rbar;
  std::string out = "# " + header.dump() + "\n";
  out += "time,x,y,z,variance\n";
  const long n_rows = std::max(1L, std::lround(p.duration / cfg.dt));
  for (long k = 0; k <= n_rows; ++k) {
    const double tt = k == n_rows ? p.duration : static_cast<double>(k) * cfg.dt;
    const auto v = collapse::most_probable_path(p, tt);
    const auto eff = collapse::effective_hamiltonian_mpp(p, tt);
    out += collapse::format_double(tt) + "," + collapse::format_double(v.x()) + "," +
           collapse::format_double(v.y()) + "," + collapse::format_double(v.z()) + "," +
           collapse::format_double(eff.variance) + "\n";
  }
  emit_text(cfg, out);
  return 0;
}

int run_freeze(const RunConfig& cfg) {
  auto meas = cfg.measurement_config();
  collapse::validate(meas);
  auto state = collapse::make_level_state(cfg.initial_amplitudes);
  const Eigen::MatrixXcd h_system =
      Eigen::MatrixXcd::Zero(state.amplitudes.size(), state.amplitudes.size());
  collapse::CounterRng rng(cfg.seed);
  collapse::TrajectoryRecord record;
  record.seed = cfg.seed;
  record.samples.push_back({0.0, state, std::nullopt});
  double t = 0.0;
  const double t_max = cfg.effective_t_max();
  while (t < t_max) {
    const auto readout = collapse::sample_readout(state, meas, rng, t);
    state = collapse::freeze_feedback_step(state, h_system, readout, meas);
    t += cfg.dt;
    record.readouts.push_back(readout);
    record.samples.push_back({t, state, readout});
  }
  emit_text(cfg, collapse::serialize_trajectory(record, cfg.echo()));
  return 0;
}

int run_kernel(const RunConfig& cfg) {
  const auto state = collapse::make_level_state(cfg.initial_amplitudes);
  const auto basis = collapse::kernel_space_basis(state);
  double max_residual = 0.0;
  ordered_json gens = ordered_json::array();
  for (const auto& g : basis) {
    max_residual = std::max(max_residual, (g * state.amplitudes).norm());
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      ordered_json rrow = ordered_json::array(), irow = ordered_json::array();
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        rrow.push_back(g(i, j).real());
        irow.push_back(g(i, j).imag());
      }
      re.push_back(rrow);
      im.push_back(irow);
    }
    gens.push_back(ordered_json{{"re", re}, {"im", im}});
  }
  ordered_json j;
  j["schema"] = "collapse-lab/1";
  j["config"] = cfg.echo();
  j["dimension"] = basis.size();
  j["max_residual"] = max_residual;
  j["generators"] = gens;
  emit_text(cfg, j.dump() + "\n");
  return 0;
}

int run_dualaxis(const RunConfig& cfg) {
  auto meas = cfg.measurement_config();
  collapse::validate(meas);
  if (cfg.initial_amplitudes.size() != 2 || meas.eigenvalues.size() != 2 ||
      meas.eigenvalues[0] != 1.0 || meas.eigenvalues[1] != -1.0) {
    throw collapse::InvalidValue("dualaxis needs a qubit with --lambda 1,-1");
  }
  const auto initial = collapse::make_level_state(cfg.initial_amplitudes);
  const auto record = collapse::dual_axis_trajectory(initial, meas, meas, cfg.seed,
                                                     cfg.effective_t_max());
  emit_text(cfg, collapse::serialize_trajectory(record, cfg.echo()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const RunConfig cfg = collapse::parse_config(args);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    switch (cfg.mode) {
      case collapse::RunMode::simulate: return run_simulate(cfg);
      case collapse::RunMode::ensemble: return run_ensemble_mode(cfg);
      case collapse::RunMode::reconstruct: return run_reconstruct(cfg);
      case collapse::RunMode::oscillator: return run_oscillator(cfg);
      case collapse::RunMode::mpp: return run_mpp(cfg);
      case collapse::RunMode::freeze: return run_freeze(cfg);
      case collapse::RunMode::kernel: return run_kernel(cfg);
      case collapse::RunMode::dualaxis: return run_dualaxis(cfg);
    }
    return 0;
  } catch (const collapse::HelpRequested& e) {
    std::cout << e.what();
    return 0;
  } catch (const collapse::UnknownFlag& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const collapse::InvalidValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const collapse::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const collapse::DegenerateEndpoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const collapse::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const collapse::Error& e) {
    std::cerr << "numeric invariant violated: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric invariant violated: " << e.what() << "\n";
    return 3;
  }
}
