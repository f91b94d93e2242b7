#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "collapse/tolerances.hpp"

namespace collapse {

enum class BasisKind { level, position_grid };

struct GridSpec {
  double x_min = 0.0;
  double dx = 0.0;
  int n = 0;
};

// Pure state. Amplitudes are stored so that sum |a_i|^2 = 1 in both bases;
// for grid states the amplitudes carry a sqrt(dx) factor relative to the
// continuum wavefunction, which keeps every operation a plain dot product.
struct QuantumState {
  Eigen::VectorXcd amplitudes;
  BasisKind basis_kind = BasisKind::level;
  std::optional<GridSpec> grid{};
};

// Normalized level-basis state; throws ZeroVector on a zero input.
QuantumState make_level_state(Eigen::VectorXcd amplitudes);

// Throws ZeroVector when the norm underflows.
QuantumState normalize(const QuantumState& state,
                       const Tolerances& tol = default_tolerances());

double norm_error(const QuantumState& state);

Eigen::VectorXd populations(const QuantumState& state);

Eigen::MatrixXcd density_from_pure(const QuantumState& state,
                                   const Tolerances& tol = default_tolerances());

// Real expectation value of a Hermitian operator. Throws NonHermitianLeak
// if the operator fails the symmetry check or the value has an imaginary
// leak beyond tolerance.
double expectation(const Eigen::MatrixXcd& op, const QuantumState& state,
                   const Tolerances& tol = default_tolerances());

std::vector<double> grid_points(const GridSpec& grid);

double mean_position(const QuantumState& state);
double position_variance(const QuantumState& state);
double position_excess_kurtosis(const QuantumState& state);

}  // namespace collapse
