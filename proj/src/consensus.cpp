// SPDX-License-Identifier: Apache-2.0

#include "qoc/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qoc/parallel.hpp"

namespace qoc::consensus {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool is_multiple(double value, double unit) {
  const double ratio = value / unit;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

int grid_steps(double value, double unit) { return static_cast<int>(std::llround(value / unit)); }

// Smallest grid step at or after `delay`.
int delay_steps(double delay, double unit) {
  if (is_multiple(delay, unit)) return grid_steps(delay, unit);
  return static_cast<int>(std::ceil(delay / unit));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Threshold below which an initial disagreement counts as exactly zero.
double zero_threshold(const std::vector<double>& d0) {
  double m = 0.0;
  for (double d : d0) m = std::max(m, std::abs(d));
  return 1e-12 * std::max(1.0, m);
}

// Runs the loop and hands every grid sample (k, x, u) to `sink`.
template <class Sink>
void run_loop(const SimConfig& config, const LoopCondition& condition, std::uint64_t run_seed,
              Sink&& sink) {
  const std::size_t n = static_cast<std::size_t>(config.n_robots);
  const int total_steps = grid_steps(config.horizon_ms, config.step_ms);
  const int period_steps = grid_steps(config.period_ms, config.step_ms);
  const int latency_steps = delay_steps(condition.e2e_delay_ms, config.step_ms);
  const double dt_s = config.step_ms / 1000.0;

  std::mt19937_64 rng(run_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> x = config.initial_positions;
  std::vector<double> x_hat = config.initial_positions;
  std::vector<double> u(n, 0.0);
  std::vector<double> pending_value(n, 0.0);
  std::vector<int> pending_due(n, -1);
  std::vector<char> delivered(n, 0);

  const bool sampled = condition.sampled.has_value();
  const double radio_success =
      sampled ? condition.sampled->model.p_ul * condition.sampled->model.p_dl : 1.0;

  auto deliver = [&](int k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pending_due[i] >= 0 && pending_due[i] <= k) {
        u[i] = pending_value[i];
        pending_due[i] = -1;
      }
    }
  };

  for (int k = 0; k <= total_steps; ++k) {
    deliver(k);
    if (k % period_steps == 0 && k < total_steps) {
      for (std::size_t i = 0; i < n; ++i) {
        bool ok;
        if (sampled) {
          const double backend = network::sample_backend_delay(condition.sampled->model, rng);
          const double radio = unit(rng);
          ok = backend <= condition.sampled->alloc_delay_ms && radio < radio_success;
        } else if (condition.success_prob >= 1.0) {
          ok = true;
        } else if (condition.success_prob <= 0.0) {
          ok = false;
        } else {
          ok = unit(rng) < condition.success_prob;
        }
        delivered[i] = ok ? 1 : 0;
        if (ok) x_hat[i] = x[i];
      }
      double sum_hat = 0.0;
      for (double v : x_hat) sum_hat += v;
      for (std::size_t i = 0; i < n; ++i) {
        if (!delivered[i]) continue;
        pending_value[i] = config.gain * (sum_hat - static_cast<double>(n) * x_hat[i]);
        pending_due[i] = k + latency_steps;
      }
      deliver(k);
    }
    sink(k, x, u);
    if (k == total_steps) break;
    for (std::size_t i = 0; i < n; ++i) x[i] += dt_s * u[i];
  }
}

}  // namespace

void SimConfig::validate() const {
  require(n_robots >= 2, "sim config: n_robots >= 2");
  require(gain > 0.0, "sim config: gain > 0");
  require(step_ms > 0.0, "sim config: step > 0");
  require(step_ms <= period_ms, "sim config: step <= period");
  require(period_ms <= horizon_ms, "sim config: period <= horizon");
  require(gain * n_robots * (step_ms / 1000.0) < 1.0,
          "sim config: gain * n_robots * step must be < 1 (Euler contraction)");
  require(is_multiple(period_ms, step_ms), "sim config: period must be a multiple of step");
  require(is_multiple(horizon_ms, step_ms), "sim config: horizon must be a multiple of step");
  require(static_cast<int>(initial_positions.size()) == n_robots,
          "sim config: initial_positions must have n_robots entries");
  require(std::any_of(initial_positions.begin(), initial_positions.end(),
                      [&](double p) { return p != initial_positions.front(); }),
          "sim config: initial positions must not all be equal");
}

SimConfig SimConfig::with_defaults(int n_robots, std::uint64_t seed) {
  SimConfig c;
  c.n_robots = n_robots;
  c.gain = 10.0 / n_robots;
  c.initial_positions = grid_positions(n_robots);
  c.seed = seed;
  return c;
}

std::vector<double> grid_positions(int n_robots) {
  std::vector<double> p(static_cast<std::size_t>(std::max(n_robots, 0)));
  if (n_robots == 1) return {0.0};
  for (int i = 0; i < n_robots; ++i) p[i] = -1.0 + 2.0 * i / (n_robots - 1);
  return p;
}

std::vector<double> random_positions(int n_robots, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0x706f73ULL));
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(std::max(n_robots, 0)));
  for (auto& v : p) v = pos(rng);
  return p;
}

void LoopCondition::validate(const SimConfig& config) const {
  require(e2e_delay_ms >= 0.0, "loop condition: e2e_delay >= 0");
  require(e2e_delay_ms <= config.period_ms * (1.0 + 1e-12), "loop condition: e2e_delay <= period");
  require(success_prob >= 0.0 && success_prob <= 1.0, "loop condition: success_prob in [0, 1]");
  if (sampled) {
    sampled->model.validate();
    require(sampled->alloc_delay_ms >= 0.0, "loop condition: alloc delay >= 0");
  }
}

bool LoopCondition::deterministic() const {
  return !sampled && (success_prob >= 1.0 || success_prob <= 0.0);
}

Trajectory simulate_run(const SimConfig& config, const LoopCondition& condition,
                        std::uint64_t run_seed) {
  config.validate();
  condition.validate(config);
  const std::size_t samples = static_cast<std::size_t>(grid_steps(config.horizon_ms, config.step_ms)) + 1;
  Trajectory t;
  t.times.resize(samples);
  t.positions = Matrix(static_cast<std::size_t>(config.n_robots), samples);
  t.controls = Matrix(static_cast<std::size_t>(config.n_robots), samples);
  t.consensus_point = mean_of(config.initial_positions);
  run_loop(config, condition, run_seed,
           [&](int k, const std::vector<double>& x, const std::vector<double>& u) {
             const auto kk = static_cast<std::size_t>(k);
             t.times[kk] = k * config.step_ms;
             for (std::size_t i = 0; i < x.size(); ++i) {
               t.positions(i, kk) = x[i];
               t.controls(i, kk) = u[i];
             }
           });
  return t;
}

DisagreementSeries disagreement_series(const Trajectory& trajectory, double horizon_ms) {
  if (!(horizon_ms > 0.0)) throw SimulationError("disagreement: horizon must be positive");
  const auto& times = trajectory.times;
  if (times.size() < 2) throw SimulationError("disagreement: trajectory has fewer than two samples");
  const double step = times[1] - times[0];
  std::size_t last = 0;
  while (last + 1 < times.size() && times[last + 1] <= horizon_ms + 1e-9 * step) ++last;
  if (std::abs(times[last] - horizon_ms) > 1e-9 * std::max(1.0, horizon_ms)) {
    throw SimulationError("disagreement: trajectory does not cover the horizon on its grid");
  }

  const std::size_t n = trajectory.positions.rows();
  const double xc = trajectory.consensus_point;
  std::vector<double> d0(n);
  for (std::size_t i = 0; i < n; ++i) d0[i] = trajectory.positions(i, 0) - xc;
  const double tiny = zero_threshold(d0);

  DisagreementSeries s;
  s.per_robot_normalized = Matrix(n, last + 1);
  s.auc_per_robot.assign(n, 0.0);
  s.excluded.assign(n, false);
  double total = 0.0;
  int included = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d0[i]) <= tiny) {
      s.excluded[i] = true;
      continue;
    }
    const double d0_sq = d0[i] * d0[i];
    double area = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
      const double d = trajectory.positions(i, k) - xc;
      const double v = d * d / d0_sq;
      s.per_robot_normalized(i, k) = v;
      if (k > 0) area += prev + v;
      prev = v;
    }
    s.auc_per_robot[i] = area * 0.5 * step / horizon_ms;
    total += s.auc_per_robot[i];
    ++included;
  }
  if (included == 0) throw SimulationError("disagreement: all robots start at the consensus point");
  s.auc_mean = total / included;
  return s;
}

namespace {

// Streaming equivalent of simulate_run + disagreement_series. Performs the
// same floating-point operations in the same order.
double run_auc(const SimConfig& config, const LoopCondition& condition, std::uint64_t run_seed) {
  const std::size_t n = static_cast<std::size_t>(config.n_robots);
  const double xc = mean_of(config.initial_positions);
  std::vector<double> d0(n), d0_sq(n), area(n, 0.0), prev(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d0[i] = config.initial_positions[i] - xc;
    d0_sq[i] = d0[i] * d0[i];
  }
  const double tiny = zero_threshold(d0);
  std::vector<char> skip(n);
  for (std::size_t i = 0; i < n; ++i) skip[i] = std::abs(d0[i]) <= tiny ? 1 : 0;

  run_loop(config, condition, run_seed,
           [&](int k, const std::vector<double>& x, const std::vector<double>&) {
             for (std::size_t i = 0; i < n; ++i) {
               if (skip[i]) continue;
               const double d = x[i] - xc;
               const double v = d * d / d0_sq[i];
               if (k > 0) area[i] += prev[i] + v;
               prev[i] = v;
             }
           });

  const double step = config.step_ms;
  const double horizon = config.horizon_ms;
  double total = 0.0;
  int included = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (skip[i]) continue;
    total += area[i] * 0.5 * step / horizon;
    ++included;
  }
  if (included == 0) throw SimulationError("disagreement: all robots start at the consensus point");
  return total / included;
}

}  // namespace

MonteCarloResult summarize_runs(const std::vector<double>& values) {
  MonteCarloResult r;
  r.n_runs = static_cast<int>(values.size());
  if (values.empty()) return r;
  const bool all_equal = std::all_of(values.begin(), values.end(),
                                     [&](double v) { return v == values.front(); });
  if (all_equal) {
    r.mean = values.front();
    return r;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    r.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return r;
}

MonteCarloResult monte_carlo_auc(const SimConfig& config, const LoopCondition& condition,
                                 int n_runs) {
  if (n_runs < 1) throw ConfigError("monte carlo: n_runs >= 1");
  config.validate();
  condition.validate(config);
  if (!(config.horizon_ms > 0.0)) throw SimulationError("monte carlo: zero horizon");

  if (condition.deterministic()) {
    const double auc = run_auc(config, condition, derive_seed(config.seed, 0));
    return summarize_runs(std::vector<double>(static_cast<std::size_t>(n_runs), auc));
  }
  std::vector<double> values(static_cast<std::size_t>(n_runs));
  parallel_for(values.size(), [&](std::size_t r) {
    values[r] = run_auc(config, condition, derive_seed(config.seed, r));
  });
  return summarize_runs(values);
}

}  // namespace qoc::consensus
