#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "collapse/control.hpp"
#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"
#include "collapse/reconstruction.hpp"
#include "collapse/rng.hpp"
#include "collapse/state.hpp"

using namespace collapse;

namespace {

QuantumState superposition3() {
  Eigen::VectorXcd v(3);
  v << std::complex<double>(0.6, 0.1), std::complex<double>(-0.3, 0.4),
      std::complex<double>(0.2, -0.5);
  return make_level_state(v);
}

GaussianMeasurementConfig three_level_config(double tau, double dt) {
  GaussianMeasurementConfig cfg;
  cfg.tau = tau;
  cfg.dt = dt;
  cfg.eigenvalues.resize(3);
  cfg.eigenvalues << 1.0, 0.0, -1.0;
  return cfg;
}

Eigen::Matrix2cd pauli(int k) {
  const std::complex<double> i1(0.0, 1.0);
  Eigen::Matrix2cd m;
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, -i1, i1, 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("feedback freezing holds a superposition in place") {
  // Strong-ish freezing regime: tau large so the per-step back-action is
  // small and the counter rotation cancels it to O(dt^2).
  auto cfg = three_level_config(50.0, 1e-4);
  Eigen::MatrixXcd h_sys = Eigen::MatrixXcd::Zero(3, 3);
  h_sys(0, 0) = 0.7;
  h_sys(1, 1) = -0.2;
  h_sys(2, 2) = 0.1;
  h_sys(0, 1) = std::complex<double>(0.3, 0.2);
  h_sys(1, 0) = std::conj(h_sys(0, 1));

  const QuantumState initial = superposition3();
  QuantumState state = initial;
  CounterRng rng(77);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto readout = sample_readout(state, cfg, rng, k * cfg.dt);
    state = freeze_feedback_step(state, h_sys, readout, cfg);
    worst = std::max(worst, 1.0 - std::abs(initial.amplitudes.dot(state.amplitudes)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("freeze residual per step shrinks quadratically with dt") {
  const QuantumState initial = superposition3();
  Eigen::MatrixXcd h_sys = Eigen::MatrixXcd::Zero(3, 3);
  // Defect at one fixed readout, dt vs dt/2.
  auto defect = [&](double dt) {
    auto cfg = three_level_config(1.0, dt);
    const QuantumState out = freeze_feedback_step(initial, h_sys, Readout{0.8, 0.0}, cfg);
    return (out.amplitudes - initial.amplitudes).norm();
  };
  const double d1 = defect(1e-3);
  const double d2 = defect(5e-4);
  CHECK(d1 < 1e-5);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("without the counter rotation the same readouts collapse the state") {
  // 15 tau of strong monitoring pins the bare run to a pointer state. The
  // feedback run keeps most of its superposition; the residual it does lose
  // is the known second-order back-action, which grows with t/tau and is why
  // the held state is compared against the collapsed one, not against 1.
  auto cfg = three_level_config(0.05, 1e-5);
  const QuantumState initial = superposition3();
  Eigen::MatrixXcd h_sys = Eigen::MatrixXcd::Zero(3, 3);

  QuantumState frozen = initial;
  QuantumState bare = initial;
  CounterRng rng_f(303), rng_b(303);
  for (int k = 0; k < 75000; ++k) {
    const auto ro_f = sample_readout(frozen, cfg, rng_f, k * cfg.dt);
    frozen = freeze_feedback_step(frozen, h_sys, ro_f, cfg);
    const auto ro_b = sample_readout(bare, cfg, rng_b, k * cfg.dt);
    bare = apply_measurement(bare, ro_b, cfg);
  }
  const double held = std::abs(initial.amplitudes.dot(frozen.amplitudes));
  const double lost = std::abs(initial.amplitudes.dot(bare.amplitudes));
  CHECK(held > 0.85);
  CHECK(lost < 0.7);
  CHECK(held - lost > 0.2);
  CHECK(populations(bare).maxCoeff() > 0.99);
}

TEST_CASE("most probable path hits both boundary conditions") {
  CounterRng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    MostProbablePathParams p;
    const double phi = 2.0 * 3.14159265358979323846 * rng.next_unit();
    const double ctheta = 2.0 * rng.next_unit() - 1.0;
    const double stheta = std::sqrt(1.0 - ctheta * ctheta);
    p.x_i = stheta * std::cos(phi);
    p.y_i = stheta * std::sin(phi);
    p.z_i = ctheta;
    p.z_f = 1.8 * rng.next_unit() - 0.9;
    p.duration = 0.2 + 2.8 * rng.next_unit();
    p.epsilon = 4.0 * rng.next_unit() - 2.0;
    p.tau = 0.3 + 1.7 * rng.next_unit();
    if (std::abs(p.z_i * p.z_f - 1.0) < 1e-6) continue;

    const Eigen::Vector3d start = most_probable_path(p, 0.0);
    CHECK((start - Eigen::Vector3d(p.x_i, p.y_i, p.z_i)).norm() < 1e-12);
    const Eigen::Vector3d end = most_probable_path(p, p.duration);
    CHECK(std::abs(end.z() - p.z_f) < 1e-9);
    // Paths of pure states stay on or inside the Bloch sphere.
    for (double f : {0.25, 0.5, 0.75}) {
      CHECK(most_probable_path(p, f * p.duration).norm() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("the equatorial-start midpoint and steering readout are pinned") {
  MostProbablePathParams p;
  p.z_f = 0.8;
  p.duration = 1.0;
  p.tau = 1.0;
  CHECK(mpp_readout(p) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(most_probable_path(p, 0.5).z() == doctest::Approx(0.5).epsilon(1e-12));
  // The z component does not feel the Larmor drive.
  auto p_eps = p;
  p_eps.epsilon = 0.4;
  CHECK(most_probable_path(p_eps, 0.5).z() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(most_probable_path(p_eps, 0.3).z() ==
        doctest::Approx(most_probable_path(p, 0.3).z()).epsilon(1e-12));
}

TEST_CASE("degenerate and unphysical boundary conditions are rejected") {
  MostProbablePathParams p;
  p.x_i = 0.0;
  p.y_i = 0.0;
  p.z_i = 1.0;
  p.z_f = 1.0;
  CHECK_THROWS_AS(validate(p), DegenerateEndpoint);
  MostProbablePathParams q;
  q.x_i = 1.2;  // |v| > 1
  q.z_f = 0.2;
  CHECK_THROWS_AS(validate(q), DegenerateEndpoint);
  MostProbablePathParams r;
  r.z_f = 0.3;
  r.duration = -1.0;
  CHECK_THROWS_AS(validate(r), InvalidConfig);
}

TEST_CASE("effective Hamiltonian is only served for the worked boundary case") {
  MostProbablePathParams p;
  p.x_i = 0.6;
  p.y_i = 0.0;
  p.z_i = 0.8;
  p.z_f = 0.2;
  CHECK_THROWS_AS(effective_hamiltonian_mpp(p, 0.3), OutsideWorkedCase);
}

TEST_CASE("effective Hamiltonian variance matches the trace formula") {
  for (double eps : {0.0, 0.7}) {
    MostProbablePathParams p;
    p.z_f = 0.8;
    p.duration = 1.0;
    p.tau = 1.0;
    p.epsilon = eps;
    for (double t : {0.0, 0.3, 0.7}) {
      const auto sample = effective_hamiltonian_mpp(p, t);
      const Eigen::MatrixXcd rho = density_from_bloch3(most_probable_path(p, t));
      const double tr_h = (rho * sample.h_eff).trace().real();
      const double tr_h2 = (rho * sample.h_eff * sample.h_eff).trace().real();
      CHECK(std::abs(tr_h) < 1e-12);  // zero mean energy along the path
      CHECK(sample.variance == doctest::Approx(tr_h2 - tr_h * tr_h).epsilon(1e-10));
      // The closed-form variance at the boundary case, spelled out.
      const double alpha = (t / p.duration) * std::atanh(p.z_f);
      const double sech = 1.0 / std::cosh(alpha);
      const double expected = (p.duration * p.duration * eps * eps +
                               std::pow(std::atanh(p.z_f), 2)) *
                              sech * sech / (4.0 * p.duration * p.duration);
      CHECK(sample.variance == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("counter Hamiltonian pins the state while H_eff alone drives it") {
  MostProbablePathParams p;
  p.z_f = 0.8;
  p.duration = 1.0;
  p.tau = 1.0;
  p.epsilon = 0.5;
  const auto report = counter_hamiltonian_check(p, 1e-3);
  CHECK(report.max_path_deviation < 1e-6);
  CHECK(report.max_counter_drift == 0.0);  // H_eff - H_eff is exactly zero
  CHECK(report.endpoint_z == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("bloch reconstruction produces unit-trace hermitian matrices") {
  const Eigen::Vector3d v(0.3, -0.5, 0.4);
  const Eigen::MatrixXcd rho = density_from_bloch3(v);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-15);
  CHECK((rho - rho.adjoint()).norm() < 1e-15);
  for (int k = 1; k <= 3; ++k) {
    CHECK((rho * pauli(k)).trace().real() == doctest::Approx(v[k - 1]).epsilon(1e-14));
  }
  const Eigen::MatrixXcd pure = density_from_bloch3(Eigen::Vector3d(0, 0, 1));
  CHECK((pure * pure - pure).norm() < 1e-15);
}
