#include "collapse/oscillator.hpp"

#include <cmath>

#include "collapse/errors.hpp"

namespace collapse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Population in the outer three cells on each side.
double edge_mass(const QuantumState& state) {
  const Eigen::VectorXd pops = populations(state);
  const Eigen::Index n = pops.size();
  double m = 0.0;
  for (Eigen::Index i = 0; i < 3 && i < n; ++i) m += pops[i] + pops[n - 1 - i];
  return m;
}

}  // namespace

QuantumState oscillator_ground_state(const PositionGridConfig& grid, double x0) {
  validate(grid, x0);
  const double mw = grid.mass * grid.omega;
  QuantumState state;
  state.basis_kind = BasisKind::position_grid;
  state.grid = grid_spec(grid);
  state.amplitudes.resize(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x_min + grid.dx * i;
    // Continuum amplitude times sqrt(dx); normalized exactly below.
    state.amplitudes[i] = std::pow(mw / kPi, 0.25) *
                          std::exp(-0.5 * mw * (x - x0) * (x - x0)) * std::sqrt(grid.dx);
  }
  return normalize(state);
}

OscillatorTrajectory oscillator_trajectory(const OscillatorRunConfig& cfg,
                                           const Tolerances& tol) {
  validate(cfg.grid, cfg.x0);
  if (!(cfg.tau > 0.0) || !(cfg.dt > 0.0) || !(cfg.t_max > 0.0)) {
    throw InvalidConfig("oscillator_trajectory: tau, dt, t_max must be positive");
  }
  GaussianMeasurementConfig meas;
  meas.tau = cfg.tau;
  meas.dt = cfg.dt;
  meas.eigenvalues.resize(0);  // grid states read pointer values off the grid

  QuantumState state = oscillator_ground_state(cfg.grid, cfg.x0);
  CounterRng rng(cfg.seed);

  OscillatorTrajectory out;
  out.record.seed = cfg.seed;
  out.record.samples.push_back({0.0, state, std::nullopt});
  out.mean_position.push_back(mean_position(state));
  out.variance.push_back(position_variance(state));
  out.excess_kurtosis.push_back(position_excess_kurtosis(state));

  double t = 0.0;
  while (t < cfg.t_max) {
    const Readout readout = sample_readout(state, meas, rng, t);
    if (position_truncation_risk(readout, state)) out.truncation_warning = true;
    state = apply_measurement(state, readout, meas, tol);
    if (edge_mass(state) > tol.grid_mass_leak) {
      throw GridTooNarrow("oscillator_trajectory: packet reached the grid edge");
    }
    t += cfg.dt;
    out.record.readouts.push_back(readout);
    out.record.samples.push_back({t, state, readout});
    out.mean_position.push_back(mean_position(state));
    out.variance.push_back(position_variance(state));
    out.excess_kurtosis.push_back(position_excess_kurtosis(state));
  }
  return out;
}

}  // namespace collapse
