// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/network.hpp"

namespace qoc::consensus {

/// Parameters of one consensus simulation. Times are in milliseconds, the
/// gain is per second.
struct SimConfig {
  int n_robots = 10;
  double gain = 1.0;
  double period_ms = 10.0;
  double horizon_ms = 2000.0;
  double step_ms = 0.5;
  std::vector<double> initial_positions;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the failed invariant. Beyond the ordering
  /// and Euler-contraction constraints, period and horizon must be integer
  /// multiples of the step so sampling instants land on the grid.
  void validate() const;

  /// Defaults with gain chosen so that gain * n_robots = 10/s and a uniform
  /// grid of initial positions on [-1, 1].
  static SimConfig with_defaults(int n_robots, std::uint64_t seed = 1);
};

/// Deterministic uniform grid on [-1, +1].
std::vector<double> grid_positions(int n_robots);

/// Uniform random positions on [-1, +1] drawn from `seed`.
std::vector<double> random_positions(int n_robots, std::uint64_t seed);

/// Optional per-period backend sampling. When set, each robot's loop succeeds
/// in a period iff a clipped backend delay draw is <= alloc_delay_ms and an
/// independent radio draw succeeds with p_ul * p_dl. Otherwise the loop uses
/// a single Bernoulli(success_prob) draw.
struct SampledBackend {
  network::DelayModel model;
  double alloc_delay_ms = 0.0;
};

/// Network condition seen by every control loop of a run.
struct LoopCondition {
  double e2e_delay_ms = 0.0;
  double success_prob = 1.0;
  std::optional<SampledBackend> sampled;

  void validate(const SimConfig& config) const;

  /// True when the condition consumes no randomness.
  bool deterministic() const;
};

struct Trajectory {
  std::vector<double> times;  ///< ms, spacing = step
  Matrix positions;           ///< n_robots x samples
  Matrix controls;            ///< control applied at each sample
  double consensus_point = 0.0;
};

struct DisagreementSeries {
  Matrix per_robot_normalized;     ///< delta_i(t)^2 / delta_i(0)^2
  std::vector<double> auc_per_robot;
  std::vector<bool> excluded;      ///< robots that start at the consensus point
  double auc_mean = 0.0;
};

/// Simulates the sampled networked consensus loop with explicit Euler.
/// Identical inputs give bit-identical trajectories.
Trajectory simulate_run(const SimConfig& config, const LoopCondition& condition,
                        std::uint64_t run_seed);

/// Normalized disagreement and the time-normalized area under it,
/// (1/T) * integral of delta^2/delta(0)^2 by the trapezoidal rule.
DisagreementSeries disagreement_series(const Trajectory& trajectory, double horizon_ms);

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  int n_runs = 0;
};

/// Average of auc_mean over n_runs runs. Run r uses
/// derive_seed(config.seed, r); runs may execute in parallel but are reduced
/// in run order.
MonteCarloResult monte_carlo_auc(const SimConfig& config, const LoopCondition& condition,
                                 int n_runs);

/// Same reduction over caller-supplied per-run AUC values.
MonteCarloResult summarize_runs(const std::vector<double>& values);

}  // namespace qoc::consensus
