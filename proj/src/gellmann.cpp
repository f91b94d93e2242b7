#include "collapse/gellmann.hpp"

#include <cmath>
#include <complex>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"

namespace collapse {

GeneratorBasis gellmann_basis(int n) {
  if (n < 2) throw InvalidConfig("gellmann_basis: n must be >= 2");
  using cd = std::complex<double>;
  GeneratorBasis basis;
  basis.dim = n;
  basis.generators.reserve(static_cast<std::size_t>(n) * n - 1);

  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
      g(j, k) = cd(1.0, 0.0);
      g(k, j) = cd(1.0, 0.0);
      basis.generators.push_back(std::move(g));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
      g(j, k) = cd(0.0, -1.0);
      g(k, j) = cd(0.0, 1.0);
      basis.generators.push_back(std::move(g));
    }
  }
  // Diagonal generators, l = 1..n-1: first l levels up, level l+1 down,
  // scaled so Tr(G^2) = 2.
  for (int l = 1; l < n; ++l) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int j = 0; j < l; ++j) g(j, j) = scale;
    g(l, l) = -scale * l;
    basis.generators.push_back(std::move(g));
  }
  return basis;
}

BlochVector bloch_decompose(const Eigen::MatrixXcd& op, const GeneratorBasis& basis,
                            const Tolerances& tol) {
  if (op.rows() != basis.dim || op.cols() != basis.dim) {
    throw DimensionMismatch("bloch_decompose: operator does not match basis dimension");
  }
  require_hermitian(op, tol.hermiticity, "bloch_decompose");
  BlochVector v;
  v.identity_coefficient = op.trace().real() / basis.dim;
  v.components.resize(static_cast<Eigen::Index>(basis.generators.size()));
  for (std::size_t i = 0; i < basis.generators.size(); ++i) {
    v.components[static_cast<Eigen::Index>(i)] =
        (op * basis.generators[i]).trace().real() / 2.0;
  }
  return v;
}

Eigen::MatrixXcd bloch_reconstruct(const BlochVector& v, const GeneratorBasis& basis) {
  if (v.components.size() != static_cast<Eigen::Index>(basis.generators.size())) {
    throw DimensionMismatch("bloch_reconstruct: component count does not match basis");
  }
  Eigen::MatrixXcd op =
      v.identity_coefficient * Eigen::MatrixXcd::Identity(basis.dim, basis.dim);
  for (std::size_t i = 0; i < basis.generators.size(); ++i) {
    op += v.components[static_cast<Eigen::Index>(i)] * basis.generators[i];
  }
  return op;
}

double bloch_dot(const BlochVector& a, const BlochVector& b) {
  if (a.components.size() != b.components.size()) {
    throw DimensionMismatch("bloch_dot: component count mismatch");
  }
  return a.components.dot(b.components);
}

}  // namespace collapse
