#include "collapse/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"

namespace collapse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian_exponent(double r, double lambda, double dt, double tau) {
  const double d = r - lambda;
  return -(dt / (4.0 * tau)) * d * d;
}

}  // namespace

void validate(const GaussianMeasurementConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw InvalidConfig("measurement config: tau must be positive");
  if (!(cfg.dt > 0.0)) throw InvalidConfig("measurement config: dt must be positive");
  if (cfg.eigenvalues.size() < 2) {
    throw InvalidConfig("measurement config: need at least two pointer values");
  }
  const double lo = cfg.eigenvalues.minCoeff();
  const double hi = cfg.eigenvalues.maxCoeff();
  if (!(hi > lo)) {
    throw InvalidConfig("measurement config: pointer values must not all coincide");
  }
}

bool weak_regime(const GaussianMeasurementConfig& cfg, const Tolerances& tol) {
  return cfg.dt / cfg.tau <= tol.weak_regime_ratio;
}

void validate(const PositionGridConfig& grid, double x0) {
  if (grid.n_points < 64) throw InvalidConfig("grid: need at least 64 points");
  if (!(grid.dx > 0.0)) throw InvalidConfig("grid: dx must be positive");
  if (!(grid.mass > 0.0) || !(grid.omega > 0.0)) {
    throw InvalidConfig("grid: mass and omega must be positive");
  }
  const double sigma = std::sqrt(1.0 / (2.0 * grid.mass * grid.omega));
  const double x_max = grid.x_min + grid.dx * (grid.n_points - 1);
  if (grid.x_min > x0 - 6.0 * sigma || x_max < x0 + 6.0 * sigma) {
    throw InvalidConfig("grid: must span 6 packet widths either side of the centre");
  }
}

GridSpec grid_spec(const PositionGridConfig& grid) {
  return GridSpec{grid.x_min, grid.dx, grid.n_points};
}

Eigen::VectorXd pointer_values(const QuantumState& state,
                               const GaussianMeasurementConfig& cfg) {
  if (state.basis_kind == BasisKind::position_grid) {
    if (!state.grid) throw InvalidConfig("pointer_values: grid state without grid spec");
    Eigen::VectorXd xs(state.grid->n);
    for (int i = 0; i < state.grid->n; ++i) xs[i] = state.grid->x_min + state.grid->dx * i;
    return xs;
  }
  if (cfg.eigenvalues.size() != state.amplitudes.size()) {
    throw DimensionMismatch("pointer_values: eigenvalue count does not match state");
  }
  return cfg.eigenvalues;
}

Eigen::MatrixXcd measurement_operator(const Readout& readout,
                                      const GaussianMeasurementConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = cfg.eigenvalues.size();
  const double prefactor = std::pow(cfg.dt / (2.0 * kPi * cfg.tau), 0.25);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = prefactor * std::exp(gaussian_exponent(readout.r, cfg.eigenvalues[i],
                                                     cfg.dt, cfg.tau));
  }
  return m;
}

Eigen::MatrixXcd position_measurement_operator(const Readout& readout,
                                               const PositionGridConfig& grid,
                                               const GaussianMeasurementConfig& cfg) {
  const double prefactor = std::pow(cfg.dt / (2.0 * kPi * cfg.tau), 0.25);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(grid.n_points, grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x_min + grid.dx * i;
    m(i, i) = prefactor * std::exp(gaussian_exponent(readout.r, x, cfg.dt, cfg.tau));
  }
  return m;
}

double readout_likelihood(const QuantumState& state, double r,
                          const GaussianMeasurementConfig& cfg) {
  const Eigen::VectorXd lambdas = pointer_values(state, cfg);
  const Eigen::VectorXd pops = populations(state);
  const double norm = std::sqrt(cfg.dt / (2.0 * kPi * cfg.tau));
  double p = 0.0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    // Normal(lambda_i, tau/dt) density; exponent matches 2x the operator's.
    p += pops[i] * norm * std::exp(2.0 * gaussian_exponent(r, lambdas[i], cfg.dt, cfg.tau));
  }
  return p;
}

Readout sample_readout(const QuantumState& state, const GaussianMeasurementConfig& cfg,
                       CounterRng& rng, double t) {
  const Eigen::VectorXd lambdas = pointer_values(state, cfg);
  const Eigen::VectorXd pops = populations(state);
  // Stage one: pointer value by population.
  const double u = rng.next_unit();
  double acc = 0.0;
  Eigen::Index pick = lambdas.size() - 1;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    acc += pops[i];
    if (u <= acc) {
      pick = i;
      break;
    }
  }
  // Stage two: Gaussian pointer noise of variance tau/dt.
  const double sigma = std::sqrt(cfg.tau / cfg.dt);
  return Readout{lambdas[pick] + sigma * rng.next_gaussian(), t};
}

QuantumState apply_measurement(const QuantumState& state, const Readout& readout,
                               const GaussianMeasurementConfig& cfg,
                               const Tolerances& tol) {
  const Eigen::VectorXd lambdas = pointer_values(state, cfg);
  const Eigen::Index n = state.amplitudes.size();

  // Shift exponents by the largest one over the occupied branches; the
  // common factor cancels in the normalization but keeps doubles in range.
  double shift = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::norm(state.amplitudes[i]) > 0.0) {
      shift = std::max(shift, gaussian_exponent(readout.r, lambdas[i], cfg.dt, cfg.tau));
    }
  }
  if (!std::isfinite(shift)) throw ZeroVector("apply_measurement: empty state");

  QuantumState out = state;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = gaussian_exponent(readout.r, lambdas[i], cfg.dt, cfg.tau);
    out.amplitudes[i] *= std::exp(g - shift);
  }
  const double shifted_norm = out.amplitudes.norm();
  // True branch norm = exp(shift) * shifted_norm * prefactor; flag readouts
  // whose branch weight cannot be represented at all.
  const double log_prefactor = 0.25 * std::log(cfg.dt / (2.0 * kPi * cfg.tau));
  const double true_log_norm = shift + std::log(shifted_norm) + log_prefactor;
  if (true_log_norm < std::log(tol.vanishing_norm)) {
    throw VanishingBranch("apply_measurement: branch norm underflows");
  }
  out.amplitudes /= shifted_norm;
  return out;
}

bool position_truncation_risk(const Readout& readout, const QuantumState& state) {
  const double sigma = std::sqrt(position_variance(state));
  return std::abs(readout.r - mean_position(state)) > 12.0 * sigma;
}

Eigen::MatrixXcd monitored_qubit_step(const Eigen::MatrixXcd& rho,
                                      const Eigen::MatrixXcd& h_system,
                                      const Readout& readout,
                                      const GaussianMeasurementConfig& cfg,
                                      const Tolerances& tol) {
  validate(cfg);
  if (rho.rows() != 2 || cfg.eigenvalues.size() != 2 ||
      cfg.eigenvalues[0] != 1.0 || cfg.eigenvalues[1] != -1.0) {
    throw InvalidConfig("monitored_qubit_step: requires qubit with pointer values (+1,-1)");
  }
  require_hermitian(rho, tol.hermiticity, "monitored_qubit_step rho");
  require_hermitian(h_system, tol.hermiticity, "monitored_qubit_step H_s");
  const Eigen::MatrixXcd u =
      hermitian_propagator(h_system, cfg.dt) * measurement_operator(readout, cfg);
  Eigen::MatrixXcd next = u * rho * u.adjoint();
  const double tr = next.trace().real();
  if (!(tr > tol.vanishing_norm)) {
    throw VanishingBranch("monitored_qubit_step: branch trace underflows");
  }
  next /= tr;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(next);
  if (es.eigenvalues().minCoeff() < tol.density_positivity) {
    throw NonPositive("monitored_qubit_step: density matrix left the positive cone");
  }
  return next;
}

Eigen::MatrixXcd monitored_qubit_rhs(const Eigen::MatrixXcd& rho,
                                     const Eigen::MatrixXcd& h_system,
                                     double r, double tau) {
  Eigen::MatrixXcd sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  const std::complex<double> i1(0.0, 1.0);
  const double mean_sz = (sz * rho).trace().real();
  return -i1 * (h_system * rho - rho * h_system) +
         (r / (2.0 * tau)) * (sz * rho + rho * sz) - (r / tau) * mean_sz * rho;
}

}  // namespace collapse
