#include "collapse/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "collapse/errors.hpp"
#include "collapse/linalg.hpp"

namespace collapse {

namespace {

int argmax_population(const QuantumState& state) {
  Eigen::Index idx = 0;
  populations(state).maxCoeff(&idx);
  return static_cast<int>(idx);
}

}  // namespace

TrajectoryRecord run_trajectory(const QuantumState& initial,
                                const GaussianMeasurementConfig& cfg,
                                std::uint64_t seed, const StopRule& stop,
                                const Tolerances& tol) {
  validate(cfg);
  if (!(stop.t_max > 0.0)) throw InvalidConfig("run_trajectory: t_max must be positive");
  QuantumState state = normalize(initial, tol);
  CounterRng rng(seed);

  TrajectoryRecord record;
  record.seed = seed;
  record.samples.push_back({0.0, state, std::nullopt});

  double t = 0.0;
  while (true) {
    const Eigen::VectorXd pops = populations(state);
    Eigen::Index best = 0;
    const double top = pops.maxCoeff(&best);
    if (top >= stop.collapse_threshold) {
      record.outcome = static_cast<int>(best);
      break;
    }
    if (t >= stop.t_max) break;

    const Readout readout = sample_readout(state, cfg, rng, t);
    state = apply_measurement(state, readout, cfg, tol);
    if (norm_error(state) > tol.unit_norm) {
      throw Error("run_trajectory: step lost normalization");
    }
    t += cfg.dt;
    record.readouts.push_back(readout);
    record.samples.push_back({t, state, readout});
  }
  return record;
}

void attach_reconstructions(TrajectoryRecord& record, const Tolerances& tol) {
  record.reconstructions.clear();
  record.reconstructions.reserve(record.samples.size());
  for (std::size_t k = 0; k < record.samples.size(); ++k) {
    const Eigen::VectorXcd d = time_derivative(record.samples, k);
    // Measurement-only evolution has zero phase rate by construction.
    record.reconstructions.push_back(
        reconstruct_hamiltonian(record.samples[k].state, d, 0.0, tol));
  }
}

EnsembleStats run_ensemble(const QuantumState& initial,
                           const GaussianMeasurementConfig& cfg, int n_trajectories,
                           std::uint64_t base_seed, const StopRule& stop,
                           int n_threads, const Tolerances& tol) {
  validate(cfg);
  if (n_trajectories < 1) throw InvalidConfig("run_ensemble: need at least one trajectory");
  const Eigen::Index dim = initial.amplitudes.size();
  // Mirror the trajectory loop's accumulated-time stepping exactly so the
  // padded series length matches the longest possible record.
  std::size_t max_steps = 0;
  for (double tt = 0.0; tt < stop.t_max; tt += cfg.dt) ++max_steps;

  // Fixed-size trajectory blocks, each summed sequentially in index order.
  // Blocks are scheduled on whatever threads are available, then reduced in
  // block order, so the result is independent of the thread count.
  constexpr int kBlock = 32;
  const int n_blocks = (n_trajectories + kBlock - 1) / kBlock;

  struct BlockSum {
    Eigen::MatrixXd pop_sum;  // (max_steps + 1) x dim
    std::vector<long> outcome_counts;
    long unresolved = 0;
    double collapse_time_sum = 0.0;
    long collapsed = 0;
  };
  std::vector<BlockSum> blocks(static_cast<std::size_t>(n_blocks));

  auto run_block = [&](int block) {
    BlockSum& sum = blocks[static_cast<std::size_t>(block)];
    sum.pop_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(max_steps) + 1, dim);
    sum.outcome_counts.assign(static_cast<std::size_t>(dim), 0);
    const int lo = block * kBlock;
    const int hi = std::min(lo + kBlock, n_trajectories);
    for (int k = lo; k < hi; ++k) {
      const TrajectoryRecord rec =
          run_trajectory(initial, cfg, substream_seed(base_seed, static_cast<std::uint64_t>(k)),
                         stop, tol);
      Eigen::VectorXd last = populations(rec.samples.front().state);
      for (std::size_t s = 0; s <= max_steps; ++s) {
        if (s < rec.samples.size()) last = populations(rec.samples[s].state);
        sum.pop_sum.row(static_cast<Eigen::Index>(s)) +=
            last.transpose();  // collapsed runs stay padded at their endpoint
      }
      if (rec.outcome) {
        ++sum.outcome_counts[static_cast<std::size_t>(*rec.outcome)];
        sum.collapse_time_sum += rec.samples.back().t;
        ++sum.collapsed;
      } else {
        ++sum.unresolved;
      }
    }
  };

  int workers = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_blocks));
  if (workers == 1) {
    for (int b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<int> next_block{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const int b = next_block.fetch_add(1);
          if (b >= n_blocks) return;
          run_block(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  EnsembleStats stats;
  stats.n_trajectories = n_trajectories;
  stats.base_seed = base_seed;
  stats.outcome_counts.assign(static_cast<std::size_t>(dim), 0);
  Eigen::MatrixXd totals =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(max_steps) + 1, dim);
  double collapse_time_sum = 0.0;
  long collapsed = 0;
  for (const BlockSum& sum : blocks) {
    totals += sum.pop_sum;
    for (std::size_t i = 0; i < stats.outcome_counts.size(); ++i) {
      stats.outcome_counts[i] += sum.outcome_counts[i];
    }
    stats.unresolved += sum.unresolved;
    collapse_time_sum += sum.collapse_time_sum;
    collapsed += sum.collapsed;
  }
  stats.times.resize(max_steps + 1);
  stats.mean_populations.resize(max_steps + 1);
  for (std::size_t s = 0; s <= max_steps; ++s) {
    stats.times[s] = static_cast<double>(s) * cfg.dt;
    stats.mean_populations[s] =
        totals.row(static_cast<Eigen::Index>(s)).transpose() / static_cast<double>(n_trajectories);
  }
  stats.mean_collapse_time = collapsed > 0 ? collapse_time_sum / static_cast<double>(collapsed) : 0.0;
  return stats;
}

ReplayReport replay_consistency(const TrajectoryRecord& record,
                                const GaussianMeasurementConfig& cfg,
                                const Tolerances& tol) {
  (void)tol;
  validate(cfg);
  if (record.samples.size() < 2) {
    throw InvalidConfig("replay_consistency: need at least two samples");
  }
  if (record.readouts.size() + 1 != record.samples.size()) {
    throw InvalidConfig("replay_consistency: readout/sample count mismatch");
  }
  ReplayReport report;
  report.infidelities.reserve(record.samples.size() - 1);
  for (std::size_t k = 0; k + 1 < record.samples.size(); ++k) {
    const double dt = record.samples[k + 1].t - record.samples[k].t;
    const Eigen::MatrixXcd h = closed_form_nlevel_h(
        record.samples[k].state.amplitudes, cfg.eigenvalues, record.readouts[k].r, cfg.tau);
    const Eigen::VectorXcd propagated =
        hermitian_propagator(h, dt) * record.samples[k].state.amplitudes;
    const Eigen::VectorXcd& actual = record.samples[k + 1].state.amplitudes;
    const double infidelity = 1.0 - std::abs(actual.dot(propagated));
    report.infidelities.push_back(infidelity);
    report.max_infidelity = std::max(report.max_infidelity, infidelity);
    report.max_step_defect = std::max(report.max_step_defect, (propagated - actual).norm());
  }
  return report;
}

TrajectoryRecord dual_axis_trajectory(const QuantumState& initial,
                                      const GaussianMeasurementConfig& cfg_z,
                                      const GaussianMeasurementConfig& cfg_x,
                                      std::uint64_t seed, double t_max,
                                      const Tolerances& tol) {
  validate(cfg_z);
  validate(cfg_x);
  if (initial.amplitudes.size() != 2) {
    throw InvalidConfig("dual_axis_trajectory: qubit only");
  }
  if (!(t_max > 0.0)) throw InvalidConfig("dual_axis_trajectory: t_max must be positive");

  // Each axis acts for half the step.
  GaussianMeasurementConfig half_z = cfg_z;
  half_z.dt = cfg_z.dt / 2.0;
  GaussianMeasurementConfig half_x = cfg_x;
  half_x.dt = cfg_z.dt / 2.0;

  Eigen::MatrixXcd had(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  had << s, s, s, -s;

  CounterRng rng_z(substream_seed(seed, 0));
  CounterRng rng_x(substream_seed(seed, 1));

  QuantumState state = normalize(initial, tol);
  TrajectoryRecord record;
  record.seed = seed;
  record.samples.push_back({0.0, state, std::nullopt});

  double t = 0.0;
  while (t < t_max) {
    // z half-step.
    Readout rz = sample_readout(state, half_z, rng_z, t);
    state = apply_measurement(state, rz, half_z, tol);
    t += half_z.dt;
    record.readouts.push_back(rz);
    record.samples.push_back({t, state, rz});

    // x half-step: rotate into the x eigenbasis, reuse the z machinery.
    QuantumState rotated = state;
    rotated.amplitudes = had * state.amplitudes;
    Readout rx = sample_readout(rotated, half_x, rng_x, t);
    rotated = apply_measurement(rotated, rx, half_x, tol);
    state.amplitudes = had * rotated.amplitudes;
    t += half_x.dt;
    record.readouts.push_back(rx);
    record.samples.push_back({t, state, rx});
  }
  record.outcome = std::nullopt;  // dual-axis monitoring has no fixed point
  return record;
}

void validate(const MixedEnsemble& ensemble, const Tolerances& tol) {
  if (ensemble.weights.size() != ensemble.members.size() || ensemble.members.empty()) {
    throw InvalidConfig("mixed ensemble: weight/member count mismatch");
  }
  double total = 0.0;
  for (double w : ensemble.weights) {
    if (w < 0.0) throw InvalidConfig("mixed ensemble: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidConfig("mixed ensemble: weights do not sum to one");
  }
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    for (std::size_t j = i; j < ensemble.members.size(); ++j) {
      const std::complex<double> ov =
          ensemble.members[i].amplitudes.dot(ensemble.members[j].amplitudes);
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(ov - want) > 1e-9) {
        throw InvalidConfig("mixed ensemble: members are not orthonormal");
      }
    }
  }
  (void)tol;
}

MixedEnsemble bayesian_mixed_update(const MixedEnsemble& ensemble, const Readout& readout,
                                    const GaussianMeasurementConfig& cfg,
                                    const Tolerances& tol) {
  if (ensemble.weights.size() != ensemble.members.size() || ensemble.members.empty()) {
    throw InvalidConfig("bayesian_mixed_update: weight/member count mismatch");
  }
  MixedEnsemble out;
  out.weights.resize(ensemble.weights.size());
  out.members.reserve(ensemble.members.size());
  double total = 0.0;
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    const double like = readout_likelihood(ensemble.members[i], readout.r, cfg);
    out.weights[i] = ensemble.weights[i] * like;
    total += out.weights[i];
  }
  if (!(total > tol.vanishing_norm)) {
    throw AllWeightsVanish("bayesian_mixed_update: total likelihood underflows");
  }
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    // A member whose posterior weight underflows is dead; its state is kept
    // as is so the branch norm guard cannot fire on it.
    if (out.weights[i] > 0.0) {
      out.members.push_back(apply_measurement(ensemble.members[i], readout, cfg, tol));
    } else {
      out.members.push_back(ensemble.members[i]);
    }
  }
  for (double& w : out.weights) w /= total;
  return out;
}

MixedTrajectoryResult run_mixed_trajectory(const MixedEnsemble& initial,
                                           const GaussianMeasurementConfig& cfg,
                                           std::uint64_t seed, int n_steps,
                                           const Tolerances& tol) {
  validate(cfg);
  validate(initial, tol);
  if (n_steps < 1) throw InvalidConfig("run_mixed_trajectory: need at least one step");
  CounterRng rng(seed);

  // The physical preparation: one member drawn once by the initial weights.
  const double u = rng.next_unit();
  double acc = 0.0;
  std::size_t truth = initial.members.size() - 1;
  for (std::size_t i = 0; i < initial.weights.size(); ++i) {
    acc += initial.weights[i];
    if (u <= acc) {
      truth = i;
      break;
    }
  }

  QuantumState physical = initial.members[truth];
  MixedEnsemble belief = initial;
  MixedTrajectoryResult result;
  result.true_member = static_cast<int>(truth);
  result.weight_series.push_back(belief.weights);
  for (int s = 0; s < n_steps; ++s) {
    const Readout readout = sample_readout(physical, cfg, rng, s * cfg.dt);
    physical = apply_measurement(physical, readout, cfg, tol);
    belief = bayesian_mixed_update(belief, readout, cfg, tol);
    result.weight_series.push_back(belief.weights);
  }
  result.final_weights = belief.weights;
  return result;
}

}  // namespace collapse
