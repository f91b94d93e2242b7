#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "collapse/measurement.hpp"
#include "collapse/state.hpp"
#include "collapse/tolerances.hpp"

namespace collapse {

struct TrajectorySample {
  double t = 0.0;
  QuantumState state;
  std::optional<Readout> readout;  // readout that produced this sample
};

// Trapezoid accumulator for the global phase integral of -i<dpsi|psi>.
// Measurement-only evolution has zero phase rate; kept for sources that do
// not.
struct PhaseAccumulator {
  double phi = 0.0;
  void add(double dt, double rate_prev, double rate_next) {
    phi += 0.5 * dt * (rate_prev + rate_next);
  }
};

// Central difference at interior samples, one-sided at the ends. Works on
// non-uniform grids; throws DuplicateTime when the stencil collapses.
Eigen::VectorXcd time_derivative(const std::vector<TrajectorySample>& samples,
                                 std::size_t k);

struct ReconstructionResult {
  Eigen::MatrixXcd hamiltonian;
  double energy_uncertainty = 0.0;
  double residual = 0.0;  // || H psi - i dpsi ||
};

// Instantaneous Hamiltonian from a state/derivative pair:
//   H = i(|dpsi~><psi~| - |psi~><dpsi~|) + phase_rate * I
// with psi~ the phase-aligned state. The radial (norm-changing) component of
// dpsi has no Hermitian generator; it is projected out before building H but
// still counted in the reported residual. Consistent inputs give zero
// residual. Throws InconsistentInput when the derivative is dominantly
// radial or the state is not normalized.
ReconstructionResult reconstruct_hamiltonian(const QuantumState& state,
                                             const Eigen::VectorXcd& dstate,
                                             double phase_rate,
                                             const Tolerances& tol = default_tolerances());

// Two-level closed form: H = [[0, i a b* r/tau], [-i a* b r/tau, 0]] for
// pointer values (+1, -1).
Eigen::MatrixXcd closed_form_qubit_h(std::complex<double> a, std::complex<double> b,
                                     double r, double tau);

// n-level closed form, H_jk = i a_j a_k* /(4 tau) sum_i |a_i|^2 (eta_ji + eta_ik)
// with eta_ik = (lambda_i - lambda_k)(2 r - lambda_i - lambda_k).
Eigen::MatrixXcd closed_form_nlevel_h(const Eigen::VectorXcd& amplitudes,
                                      const Eigen::VectorXd& lambdas,
                                      double r, double tau);

// Energy variance of the n-level closed form,
//   sum_j |a_j|^2/(16 tau^2) (sum_i |a_i|^2 eta_ij)^2.
double energy_variance_nlevel(const Eigen::VectorXcd& amplitudes,
                              const Eigen::VectorXd& lambdas,
                              double r, double tau);

// Position-space measuring Hamiltonian for a Gaussian packet centred at x0,
// sampled on the state's grid (matrix carries the dx measure).
Eigen::MatrixXcd closed_form_position_h(const QuantumState& grid_state, double x0,
                                        double r, double tau,
                                        const PositionGridConfig& grid,
                                        const Tolerances& tol = default_tolerances());

// Energy uncertainty of a monitored Gaussian packet with width dX:
//   sqrt(2 (r - x_mean)^2 dX^2 + dX^4) / (2 sqrt(2) tau).
double energy_uncertainty_position(double dX, double r, double x_mean, double tau);

// Deterministic width law dX(t)^2 = dX0^2 tau / (dX0^2 t + tau).
double variance_law(double dx0_sq, double tau, double t);

// Orthonormal basis (real-linear, Frobenius inner product) of the Hermitian
// perturbations T with T|psi> = 0. Dimension is reported by size(); for
// generic states it comes out (n-1)^2.
std::vector<Eigen::MatrixXcd> kernel_space_basis(const QuantumState& state,
                                                 const Tolerances& tol = default_tolerances());

// H + T after checking hermiticity of both and ||T psi|| < kernel_membership.
Eigen::MatrixXcd equivalent_hamiltonian(const Eigen::MatrixXcd& h,
                                        const Eigen::MatrixXcd& t,
                                        const QuantumState& state,
                                        const Tolerances& tol = default_tolerances());

struct PowerIdentityReport {
  double h2_defect = 0.0;     // || H^2 - |d><d| - w2 |psi><psi| ||
  double h3_defect = 0.0;     // || H^3 - w2 H ||
  double omega_sq = 0.0;      // w2 = <dpsi|dpsi>
};

PowerIdentityReport power_identity_check(const QuantumState& state,
                                         const Eigen::VectorXcd& dstate,
                                         const Tolerances& tol = default_tolerances());

}  // namespace collapse
