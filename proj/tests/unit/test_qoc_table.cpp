// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "qoc/common.hpp"
#include "qoc/qoc_table.hpp"

using namespace qoc;
using namespace qoc::table;
using qoc::consensus::SimConfig;
using qoc::network::DelayModel;
using qoc::network::TddFrame;

namespace {

SimConfig small_config() {
  SimConfig c = SimConfig::with_defaults(6, 2);
  c.horizon_ms = 500.0;
  return c;
}

// Direct enumeration of (last DL - first UL, first DL - last UL) over all
// slot quadruples.
std::set<std::pair<int, int>> pairs_oracle(const std::string& slots) {
  std::set<std::pair<int, int>> out;
  const int n = static_cast<int>(slots.size());
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c; d <= n; ++d)
          if (slots[a - 1] == 'U' && slots[b - 1] == 'U' && slots[c - 1] == 'D' && slots[d - 1] == 'D')
            out.emplace(d - a, c - b);
  return out;
}

}  // namespace

TEST_SUITE("qoc-table") {

TEST_CASE("deterministic sweep is monotone in delay") {
  const auto c = small_config();
  const auto r = sweep_deterministic(c, {0.0, 1.0, 2.5, 5.0, 7.5, 10.0}, 3);
  REQUIRE(r.auc.size() == 6);
  for (std::size_t k = 1; k < r.auc.size(); ++k) CHECK(r.auc[k] >= r.auc[k - 1]);
  for (double s : r.std_error) CHECK(s == 0.0);
  CHECK(r.seed == c.seed);
  CHECK(r.kind == SweepKind::deterministic_delay);
}

TEST_CASE("zero-delay sweep point matches the geometric closed form") {
  SimConfig c = SimConfig::with_defaults(4);
  c.gain = 5.0;
  c.step_ms = 0.5;
  c.period_ms = 0.5;
  c.horizon_ms = 100.0;
  const auto r = sweep_deterministic(c, {0.0}, 1);
  const double q = std::pow(1.0 - 5.0 * 4 * 0.0005, 2);
  double sum = 0.5;
  for (int k = 1; k <= 200; ++k) sum += (k == 200 ? 0.5 : 1.0) * std::pow(q, k);
  CHECK(r.auc[0] == doctest::Approx(sum * 0.5 / 100.0).epsilon(1e-9));
}

TEST_CASE("reliability sweep decreases and meets the deterministic curve at one") {
  const auto c = small_config();
  const auto r = sweep_reliability(c, {0.2, 0.5, 0.8, 1.0}, 30);
  for (std::size_t k = 1; k < r.auc.size(); ++k) {
    CHECK(r.auc[k] <= r.auc[k - 1] + 3.0 * std::hypot(r.std_error[k], r.std_error[k - 1]));
  }
  const auto d = sweep_deterministic(c, {0.0}, 30);
  CHECK(r.auc.back() == d.auc.front());
}

TEST_CASE("stochastic sweep") {
  const auto c = small_config();
  const DelayModel m;
  const auto r = sweep_stochastic(c, m, {0.0, 2.0, 5.0, 10.0}, 20);
  CHECK(r.auc[0] == 1.0);
  CHECK(r.auc[3] < 1.0);
  const auto it = sweep_stochastic(c, m, {0.0, 5.0}, 20, StochasticMode::per_iteration);
  // Clipped draws put mass at zero, so a zero allowance still delivers.
  CHECK(it.auc[0] < 1.0);
  CHECK(it.auc[1] < 1.0);
}

TEST_CASE("sweep arguments are validated") {
  const auto c = small_config();
  CHECK_THROWS_AS(sweep_deterministic(c, {}, 1), ConfigError);
  CHECK_THROWS_AS(sweep_deterministic(c, {1.0, 1.0}, 1), ConfigError);
  CHECK_THROWS_AS(sweep_deterministic(c, {11.0}, 1), ConfigError);
  CHECK_THROWS_AS(sweep_reliability(c, {0.0, 0.5}, 1), ConfigError);
  CHECK_THROWS_AS(sweep_reliability(c, {0.5, 1.2}, 1), ConfigError);
}

TEST_CASE("normalizer and QoC values") {
  std::vector<QocEntry> stable{{1, 1, 0.2, 0, 0}, {2, 1, 0.4, 0, 0}, {3, 1, 0.8, 0, 0}};
  CHECK(normalizer(stable) == 0.8);
  auto unstable = stable;
  unstable.push_back({4, 1, 1.0, 0, 0});
  CHECK(normalizer(unstable) == 1.0);

  const auto frame = TddFrame::from_pattern("UD", 4, 1, 10);
  const auto t = table_from_auc(frame, unstable);
  CHECK(t.max_auc == 1.0);
  CHECK(t.entries[0].qoc == doctest::Approx(0.8));
  CHECK(t.entries[1].qoc == doctest::Approx(0.6));
  CHECK(t.entries[2].qoc == doctest::Approx(0.2));
  CHECK(t.entries[3].qoc == 0.0);

  const auto s = table_from_auc(frame, stable);
  CHECK(s.entries[2].qoc == 0.0);
  CHECK(s.entries[0].qoc == doctest::Approx(0.75));
}

TEST_CASE("realizable pairs") {
  using P = std::vector<std::pair<int, int>>;
  CHECK(realizable_pairs(TddFrame::from_pattern("UD", 2, 1, 1)) == P{{1, 1}, {3, 1}, {3, 3}});
  CHECK(realizable_pairs(TddFrame::from_pattern("DU", 1, 1, 1)).empty());
  for (const char* pattern : {"UDUUD", "UUDUD", "UUUDD", "DUDDU"}) {
    for (int reps : {1, 2, 4}) {
      const auto f = TddFrame::from_pattern(pattern, reps, 1, 1);
      std::string slots;
      for (int r = 0; r < reps; ++r) slots += pattern;
      const auto got = realizable_pairs(f);
      CAPTURE(pattern);
      CAPTURE(reps);
      CHECK(std::set<std::pair<int, int>>(got.begin(), got.end()) == pairs_oracle(slots));
    }
  }
}

TEST_CASE("built table is deterministic and well formed") {
  const auto c = small_config();
  const DelayModel m;
  const auto frame = TddFrame::from_pattern("UDUUD", 4, 1, 133);
  const auto a = build_qoc_table(c, m, frame, 4);
  const auto b = build_qoc_table(c, m, frame, 4);
  CHECK(serialize(a) == serialize(b));
  CHECK(a.entries.size() == realizable_pairs(frame).size());
  CHECK(a.slot_ms == 0.5);
  CHECK(a.max_auc == normalizer(a.entries));
  for (const auto& e : a.entries) {
    CHECK(e.qoc >= 0.0);
    CHECK(e.qoc <= 1.0);
    if (e.auc >= 1.0) CHECK(e.qoc == 0.0);
  }
}

TEST_CASE("table build rejects frames longer than the period") {
  auto c = small_config();
  c.period_ms = 2.0;
  const auto frame = TddFrame::from_pattern("UDUUD", 4, 1, 133);
  CHECK_THROWS_AS(build_qoc_table(c, DelayModel{}, frame, 1), SimulationError);
}

TEST_CASE("serialize and parse round trip") {
  const auto c = small_config();
  DelayModel m;
  m.std_ms = 0.25;
  const auto frame = TddFrame::from_pattern("UUUDD", 2, 1, 133);
  const auto t = build_qoc_table(c, m, frame, 3);
  const auto text = serialize(t);
  const auto back = parse_table(text);
  CHECK(serialize(back) == text);
  CHECK(back.mode == t.mode);
  CHECK(back.seed == t.seed);
  CHECK(back.n_runs == 3);
  CHECK(back.model.std_ms == 0.25);
  REQUIRE(back.entries.size() == t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(back.entries[i].e2e_slots == t.entries[i].e2e_slots);
    CHECK(back.entries[i].alloc_slots == t.entries[i].alloc_slots);
    CHECK(back.entries[i].qoc == doctest::Approx(t.entries[i].qoc).epsilon(1e-11));
  }
  CHECK_THROWS_AS(parse_table("e2e_ms,alloc_ms,auc,stderr,qoc\n1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(parse_table("# slot_ms: 0.5\n"), ConfigError);
}

TEST_CASE("single-index table") {
  const auto c = small_config();
  const auto frame = TddFrame::from_pattern("UD", 2, 1, 10);
  const auto t = build_qoc_table(c, DelayModel{}, frame, 2, TableMode::single_index);
  REQUIRE(t.entries.size() == 2);
  CHECK(t.entries[0].e2e_slots == 1);
  CHECK(t.entries[0].alloc_slots == 0);
  CHECK(t.entries[0].auc == 1.0);
  CHECK(t.entries[1].e2e_slots == 3);
  CHECK(t.entries[1].alloc_slots == 2);
  CHECK(t.find(3, 1) == std::optional<std::size_t>(1));
  CHECK(t.find(3, 3) == std::optional<std::size_t>(1));
  CHECK_FALSE(t.find(2, 1).has_value());
  CHECK(t.e2e_delays_ms() == std::vector<double>{0.5, 1.5});
  CHECK(table_mode_from_string("single-index") == TableMode::single_index);
  CHECK_THROWS_AS(table_mode_from_string("bogus"), ConfigError);
}

}  // TEST_SUITE
