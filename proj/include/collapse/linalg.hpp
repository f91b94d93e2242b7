#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace collapse {

bool is_hermitian(const Eigen::MatrixXcd& op, double tol);

// Throws NonHermitianLeak naming `what` when the check fails.
void require_hermitian(const Eigen::MatrixXcd& op, double tol, const std::string& what);

// exp(-i H dt) for Hermitian H, via eigendecomposition. Exactly unitary up
// to the solver's accuracy, which is what the step tests assume.
Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double dt);

// (1/2) * sum of singular values of (a - b).
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

double operator_norm(const Eigen::MatrixXcd& op);

}  // namespace collapse
