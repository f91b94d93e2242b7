#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "collapse/measurement.hpp"
#include "collapse/reconstruction.hpp"
#include "collapse/state.hpp"
#include "collapse/tolerances.hpp"

namespace collapse {

struct StopRule {
  double t_max = 0.0;
  double collapse_threshold = 1.0 - 1e-6;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<TrajectorySample> samples;   // includes the initial state
  std::vector<Readout> readouts;           // size = samples.size() - 1
  std::vector<ReconstructionResult> reconstructions;  // empty until attached
  std::optional<int> outcome;              // eigenstate index when collapsed
};

// Repeated sample/apply until collapse threshold or t_max. Deterministic in
// the seed.
TrajectoryRecord run_trajectory(const QuantumState& initial,
                                const GaussianMeasurementConfig& cfg,
                                std::uint64_t seed, const StopRule& stop,
                                const Tolerances& tol = default_tolerances());

// Fills record.reconstructions (one per sample; endpoints use one-sided
// derivatives and are correspondingly less accurate).
void attach_reconstructions(TrajectoryRecord& record,
                            const Tolerances& tol = default_tolerances());

struct EnsembleStats {
  int n_trajectories = 0;
  std::uint64_t base_seed = 0;
  std::vector<long> outcome_counts;        // per eigenstate index
  long unresolved = 0;                     // hit t_max without collapsing
  std::vector<double> times;
  std::vector<Eigen::VectorXd> mean_populations;  // per time step
  double mean_collapse_time = 0.0;
};

// Trajectory k always uses substream_seed(base_seed, k) and partial sums are
// reduced in fixed block order, so results are identical for any thread
// count. Collapsed trajectories are padded with their final populations.
EnsembleStats run_ensemble(const QuantumState& initial,
                           const GaussianMeasurementConfig& cfg, int n_trajectories,
                           std::uint64_t base_seed, const StopRule& stop,
                           int n_threads = 1,
                           const Tolerances& tol = default_tolerances());

struct ReplayReport {
  double max_infidelity = 0.0;      // max over steps of 1 - |<psi_{k+1}|U psi_k>|
  double max_step_defect = 0.0;     // max over steps of || U psi_k - psi_{k+1} ||
  std::vector<double> infidelities;
};

// Propagates each sample with the exact exponential of the closed-form
// measuring Hamiltonian at that sample's state and readout, and compares
// against the recorded next sample. Per-step infidelity shrinks as dt^2
// when the readout sequence is refined with matched variance.
ReplayReport replay_consistency(const TrajectoryRecord& record,
                                const GaussianMeasurementConfig& cfg,
                                const Tolerances& tol = default_tolerances());

// Alternating z-axis and x-axis Gaussian monitoring, each acting for dt/2.
// Half-steps are recorded as samples: even-index readouts are z-axis, odd
// x-axis. Axis streams are substream_seed(seed, 0) and (seed, 1).
TrajectoryRecord dual_axis_trajectory(const QuantumState& initial,
                                      const GaussianMeasurementConfig& cfg_z,
                                      const GaussianMeasurementConfig& cfg_x,
                                      std::uint64_t seed, double t_max,
                                      const Tolerances& tol = default_tolerances());

// Classical mixture of candidate pure states updated against a shared
// physical readout.
struct MixedEnsemble {
  std::vector<double> weights;
  std::vector<QuantumState> members;
};

// Members must be pairwise orthonormal and weights a probability vector.
void validate(const MixedEnsemble& ensemble,
              const Tolerances& tol = default_tolerances());

// Bayes update of the weights by the readout likelihood of each member,
// members updated by the same measurement operator. Throws AllWeightsVanish
// when the total likelihood underflows.
MixedEnsemble bayesian_mixed_update(const MixedEnsemble& ensemble, const Readout& readout,
                                    const GaussianMeasurementConfig& cfg,
                                    const Tolerances& tol = default_tolerances());

struct MixedTrajectoryResult {
  int true_member = 0;
  std::vector<double> final_weights;
  std::vector<std::vector<double>> weight_series;
};

// Full mixed-state run: the physical readout comes from one member drawn
// once by the initial weights, then every member is Bayes-updated against
// that shared readout sequence.
MixedTrajectoryResult run_mixed_trajectory(const MixedEnsemble& initial,
                                           const GaussianMeasurementConfig& cfg,
                                           std::uint64_t seed, int n_steps,
                                           const Tolerances& tol = default_tolerances());

}  // namespace collapse
