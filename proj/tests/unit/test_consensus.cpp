// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "qoc/common.hpp"
#include "qoc/consensus.hpp"
#include "qoc/parallel.hpp"

using namespace qoc;
using namespace qoc::consensus;

namespace {

// Continuous-control configuration: the controller samples every Euler step.
SimConfig fast_loop(double step_ms) {
  SimConfig c = SimConfig::with_defaults(10);
  c.gain = 5.0;
  c.step_ms = step_ms;
  c.period_ms = step_ms;
  c.horizon_ms = 2000.0;
  return c;
}

// Trapezoidal AUC of the geometric sequence r^(2k), k = 0..K.
double geometric_auc(double r, int steps, double step_ms, double horizon_ms) {
  const double q = r * r;
  double sum = 0.5;
  double term = 1.0;
  for (int k = 1; k <= steps; ++k) {
    term *= q;
    sum += k == steps ? 0.5 * term : term;
  }
  return sum * step_ms / horizon_ms;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* value) { setenv("QOC_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("QOC_THREADS"); }
};

}  // namespace

TEST_SUITE("consensus") {

TEST_CASE("two robots converge to the average") {
  SimConfig c = SimConfig::with_defaults(2);
  c.gain = 5.0;
  c.initial_positions = {-1.0, 3.0};
  const auto t = simulate_run(c, LoopCondition{}, 1);
  const std::size_t last = t.times.size() - 1;
  CHECK(t.consensus_point == 1.0);
  CHECK(t.positions(0, last) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t.positions(1, last) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t.positions(0, 0) == -1.0);
  CHECK(t.times[last] == 2000.0);
}

TEST_CASE("zero success probability keeps every robot still") {
  SimConfig c = SimConfig::with_defaults(4);
  LoopCondition lost;
  lost.success_prob = 0.0;
  const auto t = simulate_run(c, lost, 7);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < t.times.size(); ++k) CHECK(t.positions(i, k) == c.initial_positions[i]);
  }
  CHECK(disagreement_series(t, c.horizon_ms).auc_mean == 1.0);
  const auto mc = monte_carlo_auc(c, lost, 5);
  CHECK(mc.mean == 1.0);
  CHECK(mc.std_error == 0.0);
}

TEST_CASE("continuous-control AUC matches the geometric closed form") {
  for (double h : {0.5, 0.25}) {
    const SimConfig c = fast_loop(h);
    const double r = 1.0 - c.gain * c.n_robots * h / 1000.0;
    const int steps = static_cast<int>(std::lround(c.horizon_ms / h));
    const double oracle = geometric_auc(r, steps, h, c.horizon_ms);
    const auto mc = monte_carlo_auc(c, LoopCondition{}, 1);
    CAPTURE(h);
    CHECK(mc.mean == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("Euler error shrinks linearly with the step") {
  const double kn = 50.0;
  const double analytic = 1000.0 / (2.0 * kn * 2000.0);
  const double e1 = std::abs(monte_carlo_auc(fast_loop(0.5), LoopCondition{}, 1).mean - analytic);
  const double e2 = std::abs(monte_carlo_auc(fast_loop(0.25), LoopCondition{}, 1).mean - analytic);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 >= 1.7);
  CHECK(e1 / e2 <= 2.3);
}

TEST_CASE("the average position is conserved without delay or loss") {
  SimConfig c = SimConfig::with_defaults(6);
  c.initial_positions = {0.3, -0.7, 0.9, 0.1, -0.2, 0.5};
  const auto t = simulate_run(c, LoopCondition{}, 1);
  const double start = std::accumulate(c.initial_positions.begin(), c.initial_positions.end(), 0.0);
  for (std::size_t k = 0; k < t.times.size(); k += 97) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += t.positions(i, k);
    CHECK(s == doctest::Approx(start).epsilon(1e-9));
  }
}

TEST_CASE("delay and loss slow convergence") {
  const SimConfig c = SimConfig::with_defaults(10);
  LoopCondition base;
  LoopCondition delayed;
  delayed.e2e_delay_ms = 6.0;
  LoopCondition lossy;
  lossy.success_prob = 0.6;
  const double a0 = monte_carlo_auc(c, base, 1).mean;
  const double a1 = monte_carlo_auc(c, delayed, 1).mean;
  const double a2 = monte_carlo_auc(c, lossy, 50).mean;
  CHECK(a0 < a1);
  CHECK(a0 < a2);
  CHECK(a2 < 1.0);
}

TEST_CASE("runs are bit-identical across thread counts") {
  SimConfig c = SimConfig::with_defaults(10, 11);
  LoopCondition cond;
  cond.success_prob = 0.7;
  cond.e2e_delay_ms = 2.0;
  MonteCarloResult one, many;
  {
    ThreadsEnv env("1");
    one = monte_carlo_auc(c, cond, 40);
  }
  {
    ThreadsEnv env("8");
    many = monte_carlo_auc(c, cond, 40);
  }
  CHECK(one.mean == many.mean);
  CHECK(one.std_error == many.std_error);
  const auto again = monte_carlo_auc(c, cond, 40);
  CHECK(again.mean == one.mean);
}

TEST_CASE("single-run Monte Carlo equals the trajectory AUC") {
  SimConfig c = SimConfig::with_defaults(5, 4);
  LoopCondition cond;
  cond.success_prob = 0.8;
  const auto mc = monte_carlo_auc(c, cond, 1);
  const auto t = simulate_run(c, cond, derive_seed(c.seed, 0));
  CHECK(mc.mean == disagreement_series(t, c.horizon_ms).auc_mean);
  CHECK(mc.std_error == 0.0);
  CHECK(mc.n_runs == 1);
}

TEST_CASE("deterministic conditions report zero standard error") {
  const SimConfig c = SimConfig::with_defaults(10);
  LoopCondition cond;
  cond.e2e_delay_ms = 4.0;
  CHECK(cond.deterministic());
  const auto mc = monte_carlo_auc(c, cond, 200);
  CHECK(mc.std_error == 0.0);
  CHECK(mc.n_runs == 200);
}

TEST_CASE("Monte Carlo estimates agree across run counts") {
  const SimConfig c = SimConfig::with_defaults(10, 3);
  LoopCondition cond;
  cond.success_prob = 0.5;
  const auto a = monte_carlo_auc(c, cond, 1000);
  SimConfig other = c;
  other.seed = 77;
  const auto b = monte_carlo_auc(other, cond, 2000);
  CHECK(a.std_error > 0.0);
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("mirrored initial positions give the same AUC") {
  SimConfig c = SimConfig::with_defaults(5);
  c.initial_positions = {0.9, -0.4, 0.2, -0.8, 0.6};
  SimConfig m = c;
  for (auto& p : m.initial_positions) p = -p;
  LoopCondition cond;
  cond.e2e_delay_ms = 3.0;
  CHECK(monte_carlo_auc(c, cond, 1).mean == doctest::Approx(monte_carlo_auc(m, cond, 1).mean).epsilon(1e-12));
}

TEST_CASE("robots at the consensus point are excluded") {
  SimConfig c = SimConfig::with_defaults(3);
  const auto t = simulate_run(c, LoopCondition{}, 1);
  const auto s = disagreement_series(t, c.horizon_ms);
  CHECK(s.excluded == std::vector<bool>{false, true, false});
  CHECK(s.auc_mean == doctest::Approx((s.auc_per_robot[0] + s.auc_per_robot[2]) / 2.0));
}

TEST_CASE("invalid configurations are rejected") {
  SimConfig c = SimConfig::with_defaults(10);
  SUBCASE("one robot") {
    c.n_robots = 1;
    c.initial_positions = {0.0};
  }
  SUBCASE("non-positive gain") { c.gain = 0.0; }
  SUBCASE("step longer than period") { c.step_ms = 20.0; }
  SUBCASE("period not on the grid") { c.period_ms = 10.3; }
  SUBCASE("horizon not on the grid") { c.horizon_ms = 2000.2; }
  SUBCASE("Euler step too large") { c.gain = 300.0; }
  SUBCASE("equal initial positions") { c.initial_positions.assign(10, 0.5); }
  SUBCASE("wrong position count") { c.initial_positions.pop_back(); }
  CHECK_THROWS_AS(simulate_run(c, LoopCondition{}, 1), ConfigError);
}

TEST_CASE("invalid loop conditions are rejected") {
  const SimConfig c = SimConfig::with_defaults(10);
  LoopCondition cond;
  SUBCASE("negative delay") { cond.e2e_delay_ms = -1.0; }
  SUBCASE("delay beyond the period") { cond.e2e_delay_ms = 10.5; }
  SUBCASE("probability above one") { cond.success_prob = 1.5; }
  CHECK_THROWS_AS(monte_carlo_auc(c, cond, 1), ConfigError);
  CHECK_THROWS_AS(monte_carlo_auc(c, LoopCondition{}, 0), ConfigError);
}

TEST_CASE("grid and random positions") {
  CHECK(grid_positions(3) == std::vector<double>{-1.0, 0.0, 1.0});
  const auto r = random_positions(20, 5);
  CHECK(r == random_positions(20, 5));
  CHECK(r != random_positions(20, 6));
  for (double p : r) {
    CHECK(p >= -1.0);
    CHECK(p <= 1.0);
  }
}

}  // TEST_SUITE
