#pragma once

#include <cstdint>
#include <vector>

#include "collapse/measurement.hpp"
#include "collapse/trajectory.hpp"

namespace collapse {

struct OscillatorRunConfig {
  PositionGridConfig grid;
  double x0 = 0.0;   // packet centre
  double tau = 1.0;
  double dt = 1e-3;
  double t_max = 1.0;
  std::uint64_t seed = 0;
};

// Ground-state Gaussian of the (mass, omega) oscillator sampled on the grid,
// width dX^2 = 1/(2 m omega).
QuantumState oscillator_ground_state(const PositionGridConfig& grid, double x0);

struct OscillatorTrajectory {
  TrajectoryRecord record;
  std::vector<double> mean_position;
  std::vector<double> variance;         // dX^2 per sample
  std::vector<double> excess_kurtosis;
  bool truncation_warning = false;
};

// Continuously position-monitored free packet (no internal dynamics). The
// posterior stays Gaussian, so the width must follow the deterministic law
// variance_law() independent of the readout draw; edge mass beyond
// grid_mass_leak throws GridTooNarrow.
OscillatorTrajectory oscillator_trajectory(const OscillatorRunConfig& cfg,
                                           const Tolerances& tol = default_tolerances());

}  // namespace collapse
