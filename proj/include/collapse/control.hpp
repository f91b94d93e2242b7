#pragma once

#include <Eigen/Dense>
#include <vector>

#include "collapse/measurement.hpp"
#include "collapse/state.hpp"
#include "collapse/tolerances.hpp"

namespace collapse {

// One feedback step that freezes the state: the Gaussian measurement acts,
// then the controller applies the exact counter-rotation exp(+i H_m dt)
// built from the closed-form measuring Hamiltonian at (state, r). The
// system Hamiltonian cancels identically inside the controller, so only the
// measurement back-action is left to undo; residual per step is O(dt^2).
QuantumState freeze_feedback_step(const QuantumState& state,
                                  const Eigen::MatrixXcd& h_system,
                                  const Readout& readout,
                                  const GaussianMeasurementConfig& cfg,
                                  const Tolerances& tol = default_tolerances());

// Boundary-value problem for the most probable monitored-qubit path between
// Bloch vectors (x_i, y_i, z_i) at t = 0 and z = z_f at t = duration, with
// Larmor drive epsilon. Valid at zero detuning.
struct MostProbablePathParams {
  double x_i = 1.0;
  double y_i = 0.0;
  double z_i = 0.0;
  double z_f = 0.0;
  double duration = 1.0;
  double epsilon = 0.0;
  double tau = 1.0;
};

// Throws DegenerateEndpoint when z_i z_f = 1 or an endpoint leaves [-1, 1],
// InvalidConfig on non-positive duration/tau.
void validate(const MostProbablePathParams& p);

// Constant readout that steers the path, (tau/duration) atanh((z_i - z_f)/(z_i z_f - 1)).
double mpp_readout(const MostProbablePathParams& p);

Eigen::Vector3d most_probable_path(const MostProbablePathParams& p, double t);

struct EffectiveHamiltonianSample {
  double t = 0.0;
  Eigen::MatrixXcd h_eff;
  double variance = 0.0;  // closed-form energy variance along the path
};

// Closed form for the worked boundary case (x_i, y_i, z_i) = (1, 0, 0);
// anything else throws OutsideWorkedCase.
EffectiveHamiltonianSample effective_hamiltonian_mpp(const MostProbablePathParams& p,
                                                     double t);

enum class Integrator { rk4 };

struct CounterHamiltonianReport {
  double max_path_deviation = 0.0;   // RK4 under H_eff vs closed-form path
  double max_counter_drift = 0.0;    // RK4 under H_eff + (-H_eff)
  double endpoint_z = 0.0;
};

// Propagates the initial density matrix with RK4: once under H_eff(t)
// (must track the closed-form path) and once with the exact counter term
// added (must stay put).
CounterHamiltonianReport counter_hamiltonian_check(const MostProbablePathParams& p,
                                                   double dt,
                                                   Integrator method = Integrator::rk4);

// (I + v . sigma) / 2.
Eigen::MatrixXcd density_from_bloch3(const Eigen::Vector3d& v);

}  // namespace collapse
