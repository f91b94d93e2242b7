#pragma once

#include <Eigen/Dense>
#include <vector>

#include "collapse/tolerances.hpp"

namespace collapse {

// Generalized Gell-Mann generators for su(n), normalized Tr(G_i G_j) = 2 d_ij.
// Ordering: all symmetric pairs (j,k) lexicographic, then all antisymmetric
// pairs, then the n-1 diagonal generators. For n = 2 this is {sx, sy, sz}.
struct GeneratorBasis {
  int dim = 0;
  std::vector<Eigen::MatrixXcd> generators;
};

GeneratorBasis gellmann_basis(int n);

// op = identity_coefficient * I + sum_i components[i] * G_i.
struct BlochVector {
  double identity_coefficient = 0.0;
  Eigen::VectorXd components;
};

BlochVector bloch_decompose(const Eigen::MatrixXcd& op, const GeneratorBasis& basis,
                            const Tolerances& tol = default_tolerances());

Eigen::MatrixXcd bloch_reconstruct(const BlochVector& v, const GeneratorBasis& basis);

// Dot product over the generator components only (identity part excluded).
double bloch_dot(const BlochVector& a, const BlochVector& b);

}  // namespace collapse
