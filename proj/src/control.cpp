#include "collapse/control.hpp"

#include <cmath>
#include <complex>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"
#include "collapse/reconstruction.hpp"

namespace collapse {

QuantumState freeze_feedback_step(const QuantumState& state,
                                  const Eigen::MatrixXcd& h_system,
                                  const Readout& readout,
                                  const GaussianMeasurementConfig& cfg,
                                  const Tolerances& tol) {
  validate(cfg);
  require_hermitian(h_system, tol.hermiticity, "freeze_feedback_step H_s");
  // The controller cancels H_s exactly and opposes the measuring
  // Hamiltonian evaluated at the pre-step state, so the net unitary part of
  // the step is exp(+i H_m dt).
  const Eigen::MatrixXcd h_m = closed_form_nlevel_h(
      state.amplitudes, pointer_values(state, cfg), readout.r, cfg.tau);
  QuantumState next = apply_measurement(state, readout, cfg, tol);
  next.amplitudes = hermitian_propagator(h_m, -cfg.dt) * next.amplitudes;
  return normalize(next, tol);
}

void validate(const MostProbablePathParams& p) {
  if (!(p.duration > 0.0)) throw InvalidConfig("mpp: duration must be positive");
  if (!(p.tau > 0.0)) throw InvalidConfig("mpp: tau must be positive");
  const double len2 = p.x_i * p.x_i + p.y_i * p.y_i + p.z_i * p.z_i;
  if (len2 > 1.0 + 1e-12) throw DegenerateEndpoint("mpp: initial point outside Bloch ball");
  if (std::abs(p.z_f) >= 1.0) throw DegenerateEndpoint("mpp: |z_f| must be < 1");
  if (std::abs(p.z_i * p.z_f - 1.0) < 1e-15) {
    throw DegenerateEndpoint("mpp: z_i z_f = 1 is a pole of the boundary map");
  }
}

double mpp_readout(const MostProbablePathParams& p) {
  validate(p);
  const double w = (p.z_i - p.z_f) / (p.z_i * p.z_f - 1.0);
  return (p.tau / p.duration) * std::atanh(w);
}

Eigen::Vector3d most_probable_path(const MostProbablePathParams& p, double t) {
  const double u = mpp_readout(p) * t / p.tau;
  const double ch = std::cosh(u), sh = std::sinh(u);
  const double denom = ch + p.z_i * sh;
  const double c = std::cos(p.epsilon * t), s = std::sin(p.epsilon * t);
  return Eigen::Vector3d{(p.x_i * c - p.y_i * s) / denom,
                         (p.y_i * c + p.x_i * s) / denom,
                         (p.z_i * ch + sh) / denom};
}

EffectiveHamiltonianSample effective_hamiltonian_mpp(const MostProbablePathParams& p,
                                                     double t) {
  validate(p);
  if (std::abs(p.x_i - 1.0) > 1e-12 || std::abs(p.y_i) > 1e-12 || std::abs(p.z_i) > 1e-12) {
    throw OutsideWorkedCase("effective_hamiltonian_mpp: closed form requires start (1,0,0)");
  }
  const double cap_t = p.duration;
  const double a = std::atanh(p.z_f);           // target rapidity
  const double alpha = (t / cap_t) * a;
  const double sech = 1.0 / std::cosh(alpha);
  const double tanh = std::tanh(alpha);
  const std::complex<double> i1(0.0, 1.0);

  EffectiveHamiltonianSample out;
  out.t = t;
  out.h_eff.resize(2, 2);
  out.h_eff(0, 0) = 0.5 * p.epsilon * sech * sech;
  out.h_eff(1, 1) = -out.h_eff(0, 0);
  const std::complex<double> phase = std::exp(-i1 * p.epsilon * t);
  out.h_eff(0, 1) = (i1 * phase / (2.0 * cap_t)) *
                    (a + i1 * cap_t * p.epsilon * tanh) * sech;
  out.h_eff(1, 0) = std::conj(out.h_eff(0, 1));
  out.variance = (cap_t * cap_t * p.epsilon * p.epsilon + a * a) * sech * sech /
                 (4.0 * cap_t * cap_t);
  return out;
}

Eigen::MatrixXcd density_from_bloch3(const Eigen::Vector3d& v) {
  Eigen::MatrixXcd rho(2, 2);
  const std::complex<double> i1(0.0, 1.0);
  rho(0, 0) = 0.5 * (1.0 + v[2]);
  rho(1, 1) = 0.5 * (1.0 - v[2]);
  rho(0, 1) = 0.5 * (v[0] - i1 * v[1]);
  rho(1, 0) = 0.5 * (v[0] + i1 * v[1]);
  return rho;
}

namespace {

Eigen::MatrixXcd commutator_rhs(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& rho) {
  const std::complex<double> i1(0.0, 1.0);
  return -i1 * (h * rho - rho * h);
}

}  // namespace

CounterHamiltonianReport counter_hamiltonian_check(const MostProbablePathParams& p,
                                                   double dt, Integrator method) {
  if (method != Integrator::rk4) throw InvalidConfig("counter_hamiltonian_check: unknown integrator");
  if (!(dt > 0.0)) throw InvalidConfig("counter_hamiltonian_check: dt must be positive");

  auto h_at = [&](double t) { return effective_hamiltonian_mpp(p, t).h_eff; };
  auto h_cancelled = [&](double t) {
    const Eigen::MatrixXcd h = h_at(t);
    return Eigen::MatrixXcd(h - h);  // controller applies the exact counter term
  };

  auto rk4_run = [&](auto&& gen, bool compare_path) {
    Eigen::MatrixXcd rho = density_from_bloch3(most_probable_path(p, 0.0));
    const Eigen::MatrixXcd rho0 = rho;
    double worst = 0.0;
    double t = 0.0;
    while (t < p.duration - 0.5 * dt) {
      const Eigen::MatrixXcd k1 = commutator_rhs(gen(t), rho);
      const Eigen::MatrixXcd k2 = commutator_rhs(gen(t + 0.5 * dt), rho + 0.5 * dt * k1);
      const Eigen::MatrixXcd k3 = commutator_rhs(gen(t + 0.5 * dt), rho + 0.5 * dt * k2);
      const Eigen::MatrixXcd k4 = commutator_rhs(gen(t + dt), rho + dt * k3);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
      const Eigen::MatrixXcd ref =
          compare_path ? density_from_bloch3(most_probable_path(p, t)) : rho0;
      worst = std::max(worst, trace_distance(rho, ref));
    }
    return std::pair<double, Eigen::MatrixXcd>{worst, rho};
  };

  CounterHamiltonianReport report;
  auto [dev, rho_final] = rk4_run(h_at, true);
  report.max_path_deviation = dev;
  report.endpoint_z = (rho_final(0, 0) - rho_final(1, 1)).real();
  report.max_counter_drift = rk4_run(h_cancelled, false).first;
  return report;
}

}  // namespace collapse
