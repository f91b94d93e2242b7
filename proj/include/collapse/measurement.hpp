#pragma once

#include <Eigen/Dense>
#include <vector>

#include "collapse/rng.hpp"
#include "collapse/state.hpp"
#include "collapse/tolerances.hpp"

namespace collapse {

// Gaussian pointer measurement of strength dt/tau per step. `eigenvalues`
// are the pointer values of the monitored observable in the level basis;
// ignored for position-grid states, where the grid points take their place.
struct GaussianMeasurementConfig {
  double tau = 1.0;
  double dt = 1e-3;
  Eigen::VectorXd eigenvalues;
};

// Throws InvalidConfig on non-positive tau/dt or fewer than two distinct
// pointer values.
void validate(const GaussianMeasurementConfig& cfg);

bool weak_regime(const GaussianMeasurementConfig& cfg,
                 const Tolerances& tol = default_tolerances());

struct Readout {
  double r = 0.0;
  double t = 0.0;
};

struct PositionGridConfig {
  double x_min = 0.0;
  double dx = 0.0;
  int n_points = 0;
  double mass = 1.0;
  double omega = 1.0;
};

// Requires n_points >= 64 and the grid to span at least 6 ground-state
// widths either side of x0.
void validate(const PositionGridConfig& grid, double x0);

GridSpec grid_spec(const PositionGridConfig& grid);

// Pointer values seen by a state: config eigenvalues for level states,
// grid positions for grid states.
Eigen::VectorXd pointer_values(const QuantumState& state,
                               const GaussianMeasurementConfig& cfg);

// Diagonal Kraus operator, prefactor (dt/2 pi tau)^(1/4) included so that
// Tr[rho M M^dag] integrates to 1 over readouts.
Eigen::MatrixXcd measurement_operator(const Readout& readout,
                                      const GaussianMeasurementConfig& cfg);

Eigen::MatrixXcd position_measurement_operator(const Readout& readout,
                                               const PositionGridConfig& grid,
                                               const GaussianMeasurementConfig& cfg);

// Readout density p(r) = sum_i |a_i|^2 Normal(r; lambda_i, tau/dt).
double readout_likelihood(const QuantumState& state, double r,
                          const GaussianMeasurementConfig& cfg);

// Two-stage mixture sampling: pick a pointer value by population, then add
// Normal(0, tau/dt) noise.
Readout sample_readout(const QuantumState& state, const GaussianMeasurementConfig& cfg,
                       CounterRng& rng, double t);

// Normalized post-measurement state. Weights are exponent-shifted before
// exponentiation, so only a readout whose true branch norm underflows
// (< vanishing_norm) throws VanishingBranch.
QuantumState apply_measurement(const QuantumState& state, const Readout& readout,
                               const GaussianMeasurementConfig& cfg,
                               const Tolerances& tol = default_tolerances());

// True when the readout sits further than 12 current widths from the state
// mean, where grid truncation of the Gaussian weights becomes a risk.
bool position_truncation_risk(const Readout& readout, const QuantumState& state);

// One monitored-qubit step rho -> U rho U^dag / Tr with
// U = exp(-i H_s dt) M(r). Eigenvalues must be (+1, -1).
Eigen::MatrixXcd monitored_qubit_step(const Eigen::MatrixXcd& rho,
                                      const Eigen::MatrixXcd& h_system,
                                      const Readout& readout,
                                      const GaussianMeasurementConfig& cfg,
                                      const Tolerances& tol = default_tolerances());

// Right-hand side of the monitored-qubit master equation at readout r:
// -i[H, rho] + (r/2 tau){sz, rho} - (r/tau)<sz> rho.
Eigen::MatrixXcd monitored_qubit_rhs(const Eigen::MatrixXcd& rho,
                                     const Eigen::MatrixXcd& h_system,
                                     double r, double tau);

}  // namespace collapse
