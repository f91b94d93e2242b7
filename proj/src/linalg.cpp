#include "collapse/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "collapse/errors.hpp"

namespace collapse {

bool is_hermitian(const Eigen::MatrixXcd& op, double tol) {
  if (op.rows() != op.cols()) return false;
  return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const Eigen::MatrixXcd& op, double tol, const std::string& what) {
  if (op.rows() != op.cols()) {
    throw DimensionMismatch(what + ": operator is not square");
  }
  if (!is_hermitian(op, tol)) {
    throw NonHermitianLeak(what + ": operator fails hermiticity check");
  }
}

Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw Error("hermitian_propagator: eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXcd phases(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    phases[i] = std::exp(std::complex<double>(0.0, -ev[i] * dt));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

double operator_norm(const Eigen::MatrixXcd& op) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace collapse
