#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"
#include "collapse/trajectory.hpp"

using namespace collapse;

namespace {

GaussianMeasurementConfig qubit_config(double tau, double dt) {
  GaussianMeasurementConfig cfg;
  cfg.tau = tau;
  cfg.dt = dt;
  cfg.eigenvalues = Eigen::Vector2d(1.0, -1.0);
  return cfg;
}

QuantumState qubit(double p0) {
  Eigen::VectorXcd v(2);
  v << std::sqrt(p0), std::sqrt(1.0 - p0);
  return make_level_state(v);
}

// Exact coarse record: pairing two half steps at fixed readouts equals one
// full step at the mean readout, because the r-independent factor cancels in
// the normalization. Keeps every 'factor'-th sample of the base record.
TrajectoryRecord coarsen(const TrajectoryRecord& fine, int factor) {
  TrajectoryRecord out;
  out.seed = fine.seed;
  for (std::size_t k = 0; k + factor <= fine.samples.size(); k += factor) {
    out.samples.push_back(fine.samples[k]);
  }
  if ((fine.samples.size() - 1) % factor == 0) {
    out.samples.push_back(fine.samples.back());
  }
  for (std::size_t k = 0; k + factor <= fine.readouts.size(); k += factor) {
    double acc = 0.0;
    for (int j = 0; j < factor; ++j) acc += fine.readouts[k + j].r;
    out.readouts.push_back(Readout{acc / factor, fine.readouts[k + factor - 1].t});
  }
  for (std::size_t k = 1; k < out.samples.size(); ++k) {
    out.samples[k].readout = out.readouts[k - 1];
  }
  return out;
}

}  // namespace

TEST_CASE("pointer eigenstates collapse immediately with their own index") {
  const auto cfg = qubit_config(0.5, 1e-3);
  Eigen::VectorXcd v(2);
  v << 0.0, 1.0;
  const auto rec = run_trajectory(make_level_state(v), cfg, 7, StopRule{1.0});
  REQUIRE(rec.outcome.has_value());
  CHECK(*rec.outcome == 1);
  CHECK(rec.samples.size() == 1);
  CHECK(rec.readouts.empty());
}

TEST_CASE("a fixed seed reproduces the trajectory exactly") {
  const auto cfg = qubit_config(0.2, 1e-3);
  const auto a = run_trajectory(qubit(0.3), cfg, 99, StopRule{2.0});
  const auto b = run_trajectory(qubit(0.3), cfg, 99, StopRule{2.0});
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK((a.samples[k].state.amplitudes - b.samples[k].state.amplitudes).norm() == 0.0);
    CHECK(a.samples[k].t == b.samples[k].t);
  }
  REQUIRE(a.readouts.size() == b.readouts.size());
  for (std::size_t k = 0; k < a.readouts.size(); ++k) {
    CHECK(a.readouts[k].r == b.readouts[k].r);
  }
  CHECK(a.outcome == b.outcome);
}

TEST_CASE("trajectory records keep time, norm, and readout bookkeeping") {
  const auto cfg = qubit_config(0.2, 1e-3);
  const auto rec = run_trajectory(qubit(0.4), cfg, 5, StopRule{2.0});
  REQUIRE(rec.samples.size() >= 2);
  CHECK(rec.readouts.size() == rec.samples.size() - 1);
  for (std::size_t k = 0; k < rec.samples.size(); ++k) {
    CHECK(rec.samples[k].t == doctest::Approx(k * cfg.dt).epsilon(1e-12));
    CHECK(norm_error(rec.samples[k].state) < 1e-12);
    if (k > 0) {
      REQUIRE(rec.samples[k].readout.has_value());
      CHECK(rec.samples[k].readout->r == rec.readouts[k - 1].r);
    }
  }
  if (rec.outcome) {
    const auto pops = populations(rec.samples.back().state);
    CHECK(pops[*rec.outcome] > 1.0 - 1e-6);
  }
}

TEST_CASE("collapse outcomes follow the initial populations") {
  const auto cfg = qubit_config(0.05, 1e-3);
  const auto stats = run_ensemble(qubit(0.3), cfg, 400, 12345, StopRule{5.0}, 2);
  CHECK(stats.unresolved == 0);
  const double f0 = double(stats.outcome_counts[0]) / 400.0;
  // 5 sigma of a Bernoulli(0.3) over 400 draws.
  CHECK(std::abs(f0 - 0.3) < 5.0 * std::sqrt(0.3 * 0.7 / 400.0));
  CHECK(stats.mean_collapse_time > 0.0);
  CHECK(stats.mean_collapse_time < 2.0);
}

TEST_CASE("mean populations stay a martingale along the ensemble") {
  const auto cfg = qubit_config(0.1, 2e-3);
  const auto stats = run_ensemble(qubit(0.3), cfg, 300, 777, StopRule{1.5}, 3);
  for (std::size_t s = 0; s < stats.times.size(); s += 100) {
    CHECK(stats.mean_populations[s].sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  const double band = 5.0 * std::sqrt(0.3 * 0.7 / 300.0);
  CHECK(std::abs(stats.mean_populations.back()[0] - 0.3) < band);
  CHECK(std::abs(stats.mean_populations.front()[0] - 0.3) < 1e-12);
}

TEST_CASE("ensemble reduction does not depend on the thread count") {
  const auto cfg = qubit_config(0.1, 1e-3);
  const auto a = run_ensemble(qubit(0.45), cfg, 37, 31, StopRule{0.8}, 1);
  const auto b = run_ensemble(qubit(0.45), cfg, 37, 31, StopRule{0.8}, 3);
  CHECK(a.outcome_counts == b.outcome_counts);
  CHECK(a.unresolved == b.unresolved);
  CHECK(a.mean_collapse_time == b.mean_collapse_time);
  REQUIRE(a.mean_populations.size() == b.mean_populations.size());
  for (std::size_t s = 0; s < a.mean_populations.size(); ++s) {
    CHECK((a.mean_populations[s] - b.mean_populations[s]).norm() == 0.0);
  }
}

TEST_CASE("short runs leave every trajectory unresolved") {
  const auto cfg = qubit_config(1.0, 1e-3);
  const auto stats = run_ensemble(qubit(0.5), cfg, 50, 3, StopRule{0.05}, 2);
  CHECK(stats.unresolved == 50);
  CHECK(std::accumulate(stats.outcome_counts.begin(), stats.outcome_counts.end(), 0L) == 0);
  CHECK(stats.mean_collapse_time == 0.0);
  CHECK(stats.times.size() == 51);
  CHECK(stats.times.back() == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("replaying closed-form generators tracks the recorded steps") {
  const auto cfg = qubit_config(1.0, 1e-3);
  auto rec = run_trajectory(qubit(0.5), cfg, 17, StopRule{0.25});
  const auto report = replay_consistency(rec, cfg);
  CHECK(report.max_infidelity < 1e-6);
  CHECK(report.max_step_defect < 0.02);
  CHECK(report.infidelities.size() == rec.samples.size() - 1);
}

TEST_CASE("per-step replay infidelity shrinks quadratically under refinement") {
  // One base run at dt/4; exact coarsenings to dt/2 and dt via mean readouts.
  const double dt = 4e-3;
  const auto cfg = qubit_config(1.0, dt / 4.0);
  auto fine = run_trajectory(qubit(0.5), cfg, 23, StopRule{1.0});
  REQUIRE_FALSE(fine.outcome.has_value());
  auto rec2 = coarsen(fine, 2);   // step dt/2
  auto rec4 = coarsen(fine, 4);   // step dt
  auto cfg2 = cfg;
  cfg2.dt = dt / 2.0;
  auto cfg4 = cfg;
  cfg4.dt = dt;
  const auto rep2 = replay_consistency(rec2, cfg2);
  const auto rep4 = replay_consistency(rec4, cfg4);
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  };
  const double ratio = mean(rep4.infidelities) / mean(rep2.infidelities);
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("coarsened records are exact trajectories of the coarser step") {
  // The even samples of a half-step run must equal a full-step run driven by
  // the pairwise mean readouts.
  const double dt = 2e-3;
  const auto cfg_h = qubit_config(0.7, dt / 2.0);
  auto cfg_f = cfg_h;
  cfg_f.dt = dt;
  const auto fine = run_trajectory(qubit(0.35), cfg_h, 29, StopRule{0.5});
  const auto coarse = coarsen(fine, 2);
  for (std::size_t k = 0; k + 1 < coarse.samples.size(); ++k) {
    const auto stepped = apply_measurement(coarse.samples[k].state,
                                           coarse.readouts[k], cfg_f);
    CHECK((stepped.amplitudes - coarse.samples[k + 1].state.amplitudes).norm() < 1e-12);
  }
}

TEST_CASE("dual-axis monitoring with an inert x channel reduces to z monitoring") {
  const auto cfg_z = qubit_config(0.3, 1e-3);
  auto cfg_x = cfg_z;
  cfg_x.tau = 1e12;
  const auto dual = dual_axis_trajectory(qubit(0.35), cfg_z, cfg_x, 55, 0.2);
  // Reference: explicit half-step z updates from the same substream.
  auto cfg_half = cfg_z;
  cfg_half.dt = cfg_z.dt / 2.0;
  CounterRng rng_z(substream_seed(55, 0));
  QuantumState psi = qubit(0.35);
  double worst = 0.0;
  std::size_t idx = 1;
  const std::size_t steps = (dual.samples.size() - 1) / 2;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto ro = sample_readout(psi, cfg_half, rng_z, 0.0);
    psi = apply_measurement(psi, ro, cfg_half);
    worst = std::max(worst,
                     (psi.amplitudes - dual.samples[idx].state.amplitudes).norm());
    idx += 2;  // skip the interleaved x half-step
  }
  // The inert channel still kicks log-weights by about r dt/tau = sqrt(dt/tau)
  // per step, a 1e-7 scale random walk here; a cadence bug would show as 1e-2.
  CHECK(worst < 1e-5);
  CHECK_FALSE(dual.outcome.has_value());
  CHECK(dual.samples[1].t == doctest::Approx(cfg_z.dt / 2.0).epsilon(1e-12));
}

TEST_CASE("a second monitored axis keeps pointer states from staying put") {
  const auto cfg = qubit_config(0.2, 1e-3);
  Eigen::VectorXcd v(2);
  v << 1.0, 0.0;
  const auto single = run_trajectory(make_level_state(v), cfg, 61, StopRule{1.0});
  REQUIRE(single.outcome.has_value());
  CHECK(single.samples.size() == 1);  // pinned immediately at the pointer state
  const auto dual = dual_axis_trajectory(make_level_state(v), cfg, cfg, 61, 1.0);
  double max_excursion = 0.0;
  for (const auto& s : dual.samples) {
    max_excursion = std::max(max_excursion, 1.0 - populations(s.state)[0]);
  }
  CHECK(max_excursion > 0.01);
}

TEST_CASE("mixed ensembles validate their members and weights") {
  MixedEnsemble mix;
  mix.weights = {0.5, 0.5};
  Eigen::VectorXcd e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  mix.members = {make_level_state(e0), make_level_state(e1)};
  CHECK_NOTHROW(validate(mix));
  mix.weights = {0.7, 0.7};
  CHECK_THROWS_AS(validate(mix), InvalidConfig);
  mix.weights = {0.5, 0.5};
  Eigen::VectorXcd skew(2);
  skew << 1.0, 1.0;
  mix.members[1] = make_level_state(skew);
  CHECK_THROWS_AS(validate(mix), InvalidConfig);
}

TEST_CASE("bayes weight update pins to the closed-form posterior") {
  MixedEnsemble mix;
  mix.weights = {0.5, 0.5};
  Eigen::VectorXcd e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  mix.members = {make_level_state(e0), make_level_state(e1)};
  const auto cfg = qubit_config(1.0, 0.01);
  // likelihood ratio exp(2 r dt / tau) = e^2 at r = 100.
  const auto post = bayesian_mixed_update(mix, Readout{100.0, 0.0}, cfg);
  CHECK(post.weights[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(post.weights[0] + post.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(bayesian_mixed_update(mix, Readout{50000.0, 0.0}, cfg),
                  AllWeightsVanish);
}

TEST_CASE("mixed trajectories identify the drawn member") {
  MixedEnsemble mix;
  mix.weights = {0.3, 0.7};
  Eigen::VectorXcd e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  mix.members = {make_level_state(e0), make_level_state(e1)};
  const auto cfg = qubit_config(0.05, 0.01);
  int picked0 = 0;
  double mean_true_weight = 0.0;
  const int runs = 300;
  for (int k = 0; k < runs; ++k) {
    const auto res = run_mixed_trajectory(mix, cfg, substream_seed(9000, k), 200);
    if (res.true_member == 0) ++picked0;
    mean_true_weight += res.final_weights[std::size_t(res.true_member)];
    CHECK(res.weight_series.size() == 201);
  }
  mean_true_weight /= runs;
  CHECK(std::abs(picked0 / double(runs) - 0.3) < 5.0 * std::sqrt(0.3 * 0.7 / runs));
  CHECK(mean_true_weight > 0.95);
}

TEST_CASE("dual-axis monitoring escapes a pointer state for almost every seed") {
  const auto cfg = qubit_config(0.2, 1e-3);
  Eigen::VectorXcd v(2);
  v << 1.0, 0.0;
  const auto pinned = make_level_state(v);
  int escaped = 0;
  for (int seed = 0; seed < 1000; ++seed) {
    const auto rec = dual_axis_trajectory(pinned, cfg, cfg, seed, 0.1);
    for (const auto& s : rec.samples) {
      if (populations(s.state)[0] < 1.0 - 1e-3) {
        ++escaped;
        break;
      }
    }
  }
  CHECK(escaped >= 990);
}

TEST_CASE("dual-axis z readouts spread wider than a single-axis run") {
  // A single monitored axis pins the state, so late readout windows all
  // average to the same pointer value. The second axis keeps the state
  // wandering, which widens the distribution of windowed means.
  const auto cfg = qubit_config(0.2, 0.01);
  const double t_max = 200.0;
  const auto single =
      run_trajectory(qubit(0.5), cfg, 101, StopRule{t_max, 2.0});  // never stops early
  REQUIRE_FALSE(single.outcome.has_value());
  const auto dual = dual_axis_trajectory(qubit(0.5), cfg, cfg, 101, t_max);

  std::vector<double> single_r, dual_r;
  for (const auto& ro : single.readouts) single_r.push_back(ro.r);
  for (std::size_t k = 0; k < dual.readouts.size(); k += 2) {
    dual_r.push_back(dual.readouts[k].r);  // even indices are the z axis
  }
  REQUIRE(single_r.size() >= 20000);
  REQUIRE(dual_r.size() >= 20000);

  auto window_mean_variance = [](const std::vector<double>& r, std::size_t w) {
    std::vector<double> means;
    for (std::size_t start = 0; start + w <= r.size(); start += w) {
      means.push_back(std::accumulate(r.begin() + start, r.begin() + start + w, 0.0) /
                      double(w));
    }
    double mu = std::accumulate(means.begin(), means.end(), 0.0) / double(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    return var / double(means.size());
  };
  const double var_single = window_mean_variance(single_r, 2000);
  const double var_dual = window_mean_variance(dual_r, 2000);
  CHECK(var_dual > var_single);
}
