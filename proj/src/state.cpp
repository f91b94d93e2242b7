#include "collapse/state.hpp"

#include <cmath>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"

namespace collapse {

QuantumState make_level_state(Eigen::VectorXcd amplitudes) {
  if (amplitudes.size() < 2) {
    throw InvalidConfig("make_level_state: need at least 2 levels");
  }
  QuantumState s;
  s.amplitudes = std::move(amplitudes);
  s.basis_kind = BasisKind::level;
  return normalize(s);
}

QuantumState normalize(const QuantumState& state, const Tolerances& tol) {
  const double n = state.amplitudes.norm();
  if (!(n > tol.vanishing_norm)) {
    throw ZeroVector("normalize: vector norm underflows");
  }
  QuantumState out = state;
  out.amplitudes /= n;
  return out;
}

double norm_error(const QuantumState& state) {
  return std::abs(state.amplitudes.norm() - 1.0);
}

Eigen::VectorXd populations(const QuantumState& state) {
  return state.amplitudes.cwiseAbs2();
}

Eigen::MatrixXcd density_from_pure(const QuantumState& state, const Tolerances& tol) {
  const QuantumState n = normalize(state, tol);
  return n.amplitudes * n.amplitudes.adjoint();
}

double expectation(const Eigen::MatrixXcd& op, const QuantumState& state,
                   const Tolerances& tol) {
  if (op.rows() != state.amplitudes.size()) {
    throw DimensionMismatch("expectation: operator/state dimension mismatch");
  }
  require_hermitian(op, tol.hermiticity, "expectation");
  const std::complex<double> value =
      state.amplitudes.dot(op * state.amplitudes);  // dot() conjugates the left side
  if (std::abs(value.imag()) >= tol.expectation_imag) {
    throw NonHermitianLeak("expectation: imaginary leak in expectation value");
  }
  return value.real();
}

std::vector<double> grid_points(const GridSpec& grid) {
  std::vector<double> xs(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) xs[static_cast<std::size_t>(i)] = grid.x_min + grid.dx * i;
  return xs;
}

namespace {

// Central moments of the |psi(x)|^2 distribution on the grid. Amplitudes
// already carry the sqrt(dx) measure, so these are plain weighted sums.
void position_moments(const QuantumState& state, double* mean, double* m2, double* m4) {
  if (state.basis_kind != BasisKind::position_grid || !state.grid) {
    throw InvalidConfig("position moments: not a grid state");
  }
  const GridSpec& g = *state.grid;
  const Eigen::VectorXd w = populations(state);
  double mu = 0.0;
  for (int i = 0; i < g.n; ++i) mu += w[i] * (g.x_min + g.dx * i);
  double s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double d = (g.x_min + g.dx * i) - mu;
    s2 += w[i] * d * d;
    s4 += w[i] * d * d * d * d;
  }
  if (mean) *mean = mu;
  if (m2) *m2 = s2;
  if (m4) *m4 = s4;
}

}  // namespace

double mean_position(const QuantumState& state) {
  double mu;
  position_moments(state, &mu, nullptr, nullptr);
  return mu;
}

double position_variance(const QuantumState& state) {
  double m2;
  position_moments(state, nullptr, &m2, nullptr);
  return m2;
}

double position_excess_kurtosis(const QuantumState& state) {
  double m2, m4;
  position_moments(state, nullptr, &m2, &m4);
  if (m2 <= 0.0) throw ZeroVector("kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace collapse
