#include "collapse/reconstruction.hpp"

#include <cmath>
#include <complex>

#include <Eigen/SVD>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"

namespace collapse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double eta(double li, double lj, double r) {
  return (li - lj) * (2.0 * r - li - lj);
}

}  // namespace

Eigen::VectorXcd time_derivative(const std::vector<TrajectorySample>& samples,
                                 std::size_t k) {
  if (samples.size() < 2) {
    throw InvalidConfig("time_derivative: need at least two samples");
  }
  if (k >= samples.size()) {
    throw InvalidConfig("time_derivative: sample index out of range");
  }
  std::size_t lo, hi;
  if (k == 0) {
    lo = 0;
    hi = 1;
  } else if (k + 1 == samples.size()) {
    lo = k - 1;
    hi = k;
  } else {
    lo = k - 1;
    hi = k + 1;
  }
  const double span = samples[hi].t - samples[lo].t;
  if (span == 0.0) throw DuplicateTime("time_derivative: stencil has zero time span");
  if (samples[hi].state.amplitudes.size() != samples[lo].state.amplitudes.size()) {
    throw DimensionMismatch("time_derivative: sample dimensions differ");
  }
  return (samples[hi].state.amplitudes - samples[lo].state.amplitudes) / span;
}

ReconstructionResult reconstruct_hamiltonian(const QuantumState& state,
                                             const Eigen::VectorXcd& dstate,
                                             double phase_rate,
                                             const Tolerances& tol) {
  const Eigen::VectorXcd& psi = state.amplitudes;
  if (psi.size() != dstate.size()) {
    throw DimensionMismatch("reconstruct_hamiltonian: state/derivative size mismatch");
  }
  if (norm_error(state) > 1e-9) {
    throw InconsistentInput("reconstruct_hamiltonian: state is not normalized");
  }
  const std::complex<double> overlap = psi.dot(dstate);  // <psi|dpsi>
  // A Hermitian generator cannot change the norm, so a dominantly radial
  // derivative has no generator to reconstruct.
  const double radial = overlap.real();
  if (std::abs(radial) > tol.norm_rate + 0.5 * dstate.norm()) {
    throw InconsistentInput("reconstruct_hamiltonian: derivative is dominantly radial");
  }

  const std::complex<double> i1(0.0, 1.0);
  const Eigen::Index n = psi.size();
  // Tangential part; discretized derivatives of unit-norm samples carry an
  // O(dt^2) radial artifact that is projected out here but still counted in
  // the residual.
  const Eigen::VectorXcd d_tan = dstate - radial * psi;
  // Phase-aligned derivative; the overall phase of psi cancels identically.
  const Eigen::VectorXcd d_tilde = d_tan + i1 * phase_rate * psi;
  Eigen::MatrixXcd h = i1 * (d_tilde * psi.adjoint() - psi * d_tilde.adjoint());
  h += phase_rate * Eigen::MatrixXcd::Identity(n, n);

  ReconstructionResult out;
  out.hamiltonian = std::move(h);
  const double var = d_tan.squaredNorm() - std::pow(overlap.imag(), 2);
  out.energy_uncertainty = std::sqrt(std::max(var, 0.0));
  out.residual = (out.hamiltonian * psi - i1 * dstate).norm();
  return out;
}

Eigen::MatrixXcd closed_form_qubit_h(std::complex<double> a, std::complex<double> b,
                                     double r, double tau) {
  if (!(tau > 0.0)) throw InvalidConfig("closed_form_qubit_h: tau must be positive");
  const std::complex<double> i1(0.0, 1.0);
  Eigen::MatrixXcd h(2, 2);
  h(0, 0) = 0.0;
  h(1, 1) = 0.0;
  h(0, 1) = i1 * a * std::conj(b) * (r / tau);
  h(1, 0) = -i1 * std::conj(a) * b * (r / tau);
  return h;
}

Eigen::MatrixXcd closed_form_nlevel_h(const Eigen::VectorXcd& amplitudes,
                                      const Eigen::VectorXd& lambdas,
                                      double r, double tau) {
  if (!(tau > 0.0)) throw InvalidConfig("closed_form_nlevel_h: tau must be positive");
  const Eigen::Index n = amplitudes.size();
  if (lambdas.size() != n) {
    throw DimensionMismatch("closed_form_nlevel_h: amplitude/pointer count mismatch");
  }
  const Eigen::VectorXd pops = amplitudes.cwiseAbs2();
  const std::complex<double> i1(0.0, 1.0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        s += pops[i] * (eta(lambdas[j], lambdas[i], r) + eta(lambdas[i], lambdas[k], r));
      }
      h(j, k) = i1 * amplitudes[j] * std::conj(amplitudes[k]) * s / (4.0 * tau);
    }
  }
  return h;
}

double energy_variance_nlevel(const Eigen::VectorXcd& amplitudes,
                              const Eigen::VectorXd& lambdas,
                              double r, double tau) {
  if (!(tau > 0.0)) throw InvalidConfig("energy_variance_nlevel: tau must be positive");
  const Eigen::Index n = amplitudes.size();
  if (lambdas.size() != n) {
    throw DimensionMismatch("energy_variance_nlevel: amplitude/pointer count mismatch");
  }
  const Eigen::VectorXd pops = amplitudes.cwiseAbs2();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += pops[i] * eta(lambdas[i], lambdas[j], r);
    total += pops[j] * s * s;
  }
  return total / (16.0 * tau * tau);
}

Eigen::MatrixXcd closed_form_position_h(const QuantumState& grid_state, double x0,
                                        double r, double tau,
                                        const PositionGridConfig& grid,
                                        const Tolerances& tol) {
  if (!(tau > 0.0)) throw InvalidConfig("closed_form_position_h: tau must be positive");
  if (grid_state.basis_kind != BasisKind::position_grid || !grid_state.grid) {
    throw InvalidConfig("closed_form_position_h: state is not on a position grid");
  }
  if (grid_state.grid->n != grid.n_points) {
    throw DimensionMismatch("closed_form_position_h: state grid does not match config");
  }
  const int n = grid.n_points;
  const double mw = grid.mass * grid.omega;
  // Packet amplitude at the grid points; the pair product reproduces the
  // Gaussian kernel, and dx makes the matrix act as the integral operator.
  Eigen::VectorXd packet(n);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = grid.x_min + grid.dx * i;
    packet[i] = std::pow(mw / kPi, 0.25) * std::exp(-0.5 * mw * (x - x0) * (x - x0));
    mass += packet[i] * packet[i] * grid.dx;
  }
  if (1.0 - mass > tol.grid_mass_leak) {
    throw GridTooNarrow("closed_form_position_h: packet mass outside grid");
  }
  const std::complex<double> i1(0.0, 1.0);
  Eigen::MatrixXcd h(n, n);
  for (int k = 0; k < n; ++k) {
    const double xk = grid.x_min + grid.dx * k;
    for (int l = 0; l < n; ++l) {
      const double xl = grid.x_min + grid.dx * l;
      h(k, l) = i1 * (eta(xk, xl, r) / (4.0 * tau)) * packet[k] * packet[l] * grid.dx;
    }
  }
  return h;
}

double energy_uncertainty_position(double dX, double r, double x_mean, double tau) {
  if (!(dX > 0.0)) throw InvalidConfig("energy_uncertainty_position: width must be positive");
  if (!(tau > 0.0)) throw InvalidConfig("energy_uncertainty_position: tau must be positive");
  const double d2 = dX * dX;
  const double off = r - x_mean;
  return std::sqrt(2.0 * off * off * d2 + d2 * d2) / (2.0 * std::sqrt(2.0) * tau);
}

double variance_law(double dx0_sq, double tau, double t) {
  return dx0_sq * tau / (dx0_sq * t + tau);
}

std::vector<Eigen::MatrixXcd> kernel_space_basis(const QuantumState& state,
                                                 const Tolerances& tol) {
  const Eigen::VectorXcd& psi = state.amplitudes;
  const int n = static_cast<int>(psi.size());
  if (n < 2) throw InvalidConfig("kernel_space_basis: need dimension >= 2");

  // Real parameterization of Hermitian T, Frobenius-orthonormal directions:
  // n diagonal entries, then (re, im) pairs per off-diagonal scaled 1/sqrt2.
  const int n_params = n * n;
  struct OffDiag {
    int j, k;
  };
  std::vector<OffDiag> pairs;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) pairs.push_back({j, k});

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // T psi = 0 as a real-linear system: 2n equations, n^2 unknowns.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, n_params);
  auto put = [&](int row, int param, std::complex<double> coeff) {
    a(2 * row, param) = coeff.real();
    a(2 * row + 1, param) = coeff.imag();
  };
  for (int m = 0; m < n; ++m) put(m, m, psi[m]);
  const std::complex<double> i1(0.0, 1.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const int j = pairs[p].j, k = pairs[p].k;
    const int re_param = n + 2 * static_cast<int>(p);
    const int im_param = re_param + 1;
    put(j, re_param, inv_sqrt2 * psi[k]);
    put(k, re_param, inv_sqrt2 * psi[j]);
    put(j, im_param, -i1 * inv_sqrt2 * psi[k]);
    put(k, im_param, i1 * inv_sqrt2 * psi[j]);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol.svd_rank_cutoff * (sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }

  std::vector<Eigen::MatrixXcd> basis;
  for (int col = rank; col < n_params; ++col) {
    const Eigen::VectorXd u = svd.matrixV().col(col);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (int m = 0; m < n; ++m) t(m, m) = u[m];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int j = pairs[p].j, k = pairs[p].k;
      const double re = u[n + 2 * static_cast<int>(p)];
      const double im = u[n + 2 * static_cast<int>(p) + 1];
      t(j, k) = inv_sqrt2 * std::complex<double>(re, -im);
      t(k, j) = inv_sqrt2 * std::complex<double>(re, im);
    }
    if ((t * psi).norm() > tol.kernel_residual) {
      throw Error("kernel_space_basis: nullspace element fails residual check");
    }
    basis.push_back(std::move(t));
  }
  return basis;
}

Eigen::MatrixXcd equivalent_hamiltonian(const Eigen::MatrixXcd& h,
                                        const Eigen::MatrixXcd& t,
                                        const QuantumState& state,
                                        const Tolerances& tol) {
  require_hermitian(h, tol.hermiticity, "equivalent_hamiltonian H");
  require_hermitian(t, tol.hermiticity, "equivalent_hamiltonian T");
  if (h.rows() != t.rows() || h.rows() != state.amplitudes.size()) {
    throw DimensionMismatch("equivalent_hamiltonian: dimension mismatch");
  }
  if ((t * state.amplitudes).norm() >= tol.kernel_membership) {
    throw NotInKernel("equivalent_hamiltonian: perturbation does not annihilate the state");
  }
  return h + t;
}

PowerIdentityReport power_identity_check(const QuantumState& state,
                                         const Eigen::VectorXcd& dstate,
                                         const Tolerances& tol) {
  const Eigen::VectorXcd& psi = state.amplitudes;
  if (psi.size() != dstate.size()) {
    throw DimensionMismatch("power_identity_check: state/derivative size mismatch");
  }
  const std::complex<double> overlap = psi.dot(dstate);
  if (std::abs(overlap) >= tol.norm_rate) {
    // The recursion needs <psi|dpsi> = 0, not just norm conservation.
    throw InconsistentInput("power_identity_check: derivative not orthogonal to state");
  }
  const ReconstructionResult rec = reconstruct_hamiltonian(state, dstate, 0.0, tol);
  const Eigen::MatrixXcd& h = rec.hamiltonian;
  PowerIdentityReport report;
  report.omega_sq = dstate.squaredNorm();
  const Eigen::MatrixXcd h2_expected =
      dstate * dstate.adjoint() + report.omega_sq * psi * psi.adjoint();
  report.h2_defect = (h * h - h2_expected).norm();
  report.h3_defect = (h * h * h - report.omega_sq * h).norm();
  return report;
}

}  // namespace collapse
