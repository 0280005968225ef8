// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "qoc/allocator.hpp"
#include "qoc/common.hpp"

using namespace qoc;
using namespace qoc::alloc;
using qoc::network::TddFrame;
using qoc::table::QocEntry;

namespace {

table::QocTable crafted_table(const TddFrame& frame, const std::vector<QocEntry>& rows) {
  table::QocTable t;
  t.slot_ms = frame.slot_duration_ms();
  t.entries = rows;
  return t;
}

Instance make(const std::string& pattern, int reps, int capacity, int n, int u, int d,
              const std::vector<QocEntry>& rows) {
  Instance inst;
  inst.frame = TddFrame::from_pattern(pattern, reps, 1, capacity);
  inst.n_robots = n;
  inst.ul_need = u;
  inst.dl_need = d;
  inst.table = crafted_table(inst.frame, rows);
  return inst;
}

// UD x 2 realizes (1,1), (3,1) and (3,3).
std::vector<QocEntry> ud_rows(double q11, double q31, double q33) {
  return {{1, 1, 1.0 - q11, 0, q11}, {3, 1, 1.0 - q31, 0, q31}, {3, 3, 1.0 - q33, 0, q33}};
}

// UDUUD x 1 realizes (1,1), (2,1), (2,2), (4,1), (4,2), (4,4).
Instance golden_instance() {
  return make("UDUUD", 1, 4, 2, 2, 2,
              {{1, 1, 1.0, 0, 0.0},
               {2, 1, 0.75, 0, 0.25},
               {2, 2, 0.5, 0, 0.5},
               {4, 1, 0.875, 0, 0.125},
               {4, 2, 0.625, 0, 0.375},
               {4, 4, 0.25, 0, 0.75}});
}

bool has(const std::vector<Violation>& v, const std::string& constraint) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.constraint == constraint; });
}

std::string binding_of(const Instance& inst, Scheme s) {
  try {
    solve(inst, s);
  } catch (const InfeasibleError& e) {
    return e.binding();
  }
  return "";
}

}  // namespace

TEST_SUITE("allocator") {

TEST_CASE("scheme names") {
  for (Scheme s : all_schemes) {
    CHECK(scheme_from_string(scheme_name(s)) == s);
    CHECK(scheme_from_string(std::to_string(scheme_number(s))) == s);
  }
  CHECK(scheme_label(Scheme::max_delay) == "Maximize reliability");
  CHECK(scheme_number(Scheme::min_delay_stable) == 4);
  CHECK_THROWS_AS(scheme_from_string("fastest"), ConfigError);
}

TEST_CASE("single robot on a two-slot pattern") {
  const auto inst = make("UD", 2, 2, 1, 1, 2, ud_rows(0.5, 0.25, 0.75));
  const auto s = solve(inst, Scheme::min_delay);
  CHECK(s.first_ul[0] == 1);
  CHECK(s.last_ul[0] == 1);
  CHECK(s.first_dl[0] == 2);
  CHECK(s.last_dl[0] == 2);
  CHECK(s.e2e_delay_ms[0] == 0.5);
  CHECK(s.alloc_delay_ms[0] == 0.5);
  CHECK(s.ul_alloc(0, 0) == 1);
  CHECK(s.dl_alloc(0, 1) == 2);
  CHECK(s.objective_value == 0.5);
  CHECK(validate(s, inst).empty());

  const auto q = solve(inst, Scheme::max_qoc);
  CHECK(q.total_qoc == 0.75);
  CHECK(q.e2e_slots[0] == 3);
  CHECK(q.alloc_slots[0] == 3);
  CHECK(validate(q, inst).empty());
}

TEST_CASE("schemes coincide when one window dominates") {
  // Only e2e = 1 carries QoC and capacity is ample.
  const auto inst = make("UD", 2, 50, 3, 2, 2, ud_rows(0.5, 0.0, 0.0));
  const auto base = solve(inst, Scheme::max_qoc);
  for (Scheme s : {Scheme::min_delay, Scheme::min_delay_stable}) {
    const auto other = solve(inst, s);
    CHECK(other.window_vector() == base.window_vector());
    CHECK(other.total_qoc == base.total_qoc);
  }
  CHECK(base.total_qoc == 1.5);
  CHECK(solve(inst, Scheme::max_delay).total_e2e_slots == 9);
}

TEST_CASE("max-qoc strictly beats min-delay when the shortest loop is unstable") {
  const auto inst = make("UD", 2, 4, 2, 1, 1, ud_rows(0.0, 0.25, 0.5));
  const auto q = solve(inst, Scheme::max_qoc);
  const auto d = solve(inst, Scheme::min_delay);
  const auto st = solve(inst, Scheme::min_delay_stable);
  CHECK(d.total_qoc == 0.0);
  CHECK(q.total_qoc == 1.0);
  CHECK(q.total_qoc > d.total_qoc);
  CHECK(st.total_e2e_slots == 6);
  for (double v : st.qoc) CHECK(v > 0.0);
}

TEST_CASE("solve agrees with exhaustive search on a random corpus") {
  std::mt19937_64 rng(2024);
  int feasible = 0;
  for (int k = 0; k < 80; ++k) {
    const auto inst = qoc::testing::random_instance(rng);
    std::vector<Solution> sols;
    for (Scheme s : all_schemes) {
      CAPTURE(k);
      CAPTURE(scheme_name(s));
      std::string fast_err, slow_err;
      Solution fast, slow;
      try {
        fast = solve(inst, s);
      } catch (const InfeasibleError& e) {
        fast_err = e.binding();
      }
      try {
        slow = brute_force(inst, s);
      } catch (const InfeasibleError& e) {
        slow_err = e.binding();
      }
      REQUIRE(fast_err == slow_err);
      if (!fast_err.empty()) continue;
      ++feasible;
      CHECK(fast.objective_value == doctest::Approx(slow.objective_value).epsilon(1e-12));
      CHECK(fast.window_vector() == slow.window_vector());
      CHECK(fast.proven_optimal);
      CHECK(validate(fast, inst).empty());
      CHECK(validate(slow, inst).empty());
      sols.push_back(fast);
    }
    if (sols.size() == 4) {
      CHECK(sols[0].total_qoc >= sols[1].total_qoc - 1e-9);
      CHECK(sols[0].total_qoc >= sols[2].total_qoc - 1e-9);
      CHECK(sols[0].total_qoc >= sols[3].total_qoc - 1e-9);
      CHECK(sols[1].total_e2e_slots <= sols[2].total_e2e_slots);
      CHECK(sols[1].total_e2e_slots <= sols[3].total_e2e_slots);
      CHECK(sols[2].total_e2e_slots >= sols[3].total_e2e_slots);
    }
  }
  CHECK(feasible > 60);
}

TEST_CASE("golden instance") {
  std::ifstream in(std::string(QOC_FIXTURE_DIR) + "/golden_allocations.txt");
  REQUIRE(in.good());
  const auto inst = golden_instance();
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string name;
    double objective = 0.0;
    row >> name >> objective;
    std::vector<int> windows;
    for (int v; row >> v;) windows.push_back(v);
    const auto s = solve(inst, scheme_from_string(name));
    CAPTURE(name);
    CHECK(s.objective_value == objective);
    CHECK(s.window_vector() == windows);
    CHECK(validate(s, inst).empty());
    ++checked;
  }
  CHECK(checked == 4);
}

TEST_CASE("infeasible instances name the binding constraint") {
  SUBCASE("uplink capacity") {
    const auto inst = make("UD", 2, 3, 2, 4, 1, ud_rows(0.5, 0.5, 0.5));
    CHECK_THROWS_AS(inst.validate(), InfeasibleError);
    CHECK(binding_of(inst, Scheme::max_qoc) == "13");
  }
  SUBCASE("no downlink after the uplink") {
    const auto inst = make("DU", 1, 3, 1, 1, 1, {});
    CHECK(binding_of(inst, Scheme::min_delay) == "edge-gating");
  }
  SUBCASE("no stable window") {
    const auto inst = make("UD", 2, 3, 1, 1, 1, ud_rows(0.0, 0.0, 0.0));
    CHECK(binding_of(inst, Scheme::min_delay_stable) == "qoc-positive");
    CHECK(binding_of(inst, Scheme::min_delay).empty());
  }
  SUBCASE("aggregate uplink demand") {
    const auto inst = make("UUDD", 1, 2, 2, 1, 2, {{1, 1, 0.5, 0, 0.5}, {2, 1, 0.5, 0, 0.5},
                                                   {2, 2, 0.5, 0, 0.5}, {3, 1, 0.5, 0, 0.5},
                                                   {3, 2, 0.5, 0, 0.5}, {3, 3, 0.5, 0, 0.5}});
    CHECK(binding_of(inst, Scheme::max_qoc).empty());
    auto crowded = inst;
    crowded.n_robots = 3;
    crowded.dl_need = 1;
    crowded.frame.capacity = 1;
    CHECK(binding_of(crowded, Scheme::max_qoc) == "13");
  }
}

TEST_CASE("malformed instances") {
  auto inst = make("UD", 2, 3, 1, 1, 1, ud_rows(0.5, 0.5, 0.5));
  SUBCASE("missing table entry") { inst.table.entries.pop_back(); }
  SUBCASE("qoc out of range") { inst.table.entries[0].qoc = 1.5; }
  SUBCASE("slot duration mismatch") { inst.table.slot_ms = 1.0; }
  SUBCASE("zero robots") { inst.n_robots = 0; }
  SUBCASE("big M too small") { inst.big_m = 2; }
  CHECK_THROWS_AS(inst.validate(), ConfigError);
}

TEST_CASE("validate reports violated constraints") {
  const auto inst = golden_instance();
  const auto good = solve(inst, Scheme::max_qoc);
  REQUIRE(validate(good, inst).empty());

  SUBCASE("capacity") {
    auto s = good;
    int slot = -1;
    for (int j = 0; j < inst.phi(); ++j) {
      if (inst.frame.kind(j + 1) == network::SlotKind::uplink && s.ul_alloc(0, j) + s.ul_alloc(1, j) == inst.frame.capacity) {
        slot = j;
        break;
      }
    }
    REQUIRE(slot >= 0);
    s.ul_alloc(0, static_cast<std::size_t>(slot)) += 1;
    CHECK(has(validate(s, inst), "13"));
  }
  SUBCASE("first uplink marker") {
    auto s = good;
    s.first_ul[0] += 1;
    CHECK(has(validate(s, inst), "17-18"));
  }
  SUBCASE("objective") {
    auto s = good;
    s.objective_value += 0.5;
    CHECK(has(validate(s, inst), "objective"));
  }
  SUBCASE("wrong direction") {
    auto s = good;
    s.ul_alloc(0, 1) = 1;
    CHECK(has(validate(s, inst), "direction"));
  }
}

TEST_CASE("materialize rejects windows that cannot be packed") {
  const auto inst = golden_instance();
  auto heavy = inst;
  heavy.ul_need = 3;
  CHECK_THROWS_AS(materialize(heavy, Scheme::max_qoc, {{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}), InfeasibleError);
  const auto s = materialize(inst, Scheme::max_qoc, {{1, 1}, {1, 1}}, {{2, 2}, {5, 5}});
  CHECK(s.e2e_slots == std::vector<int>{1, 4});
  CHECK(s.alloc_slots == std::vector<int>{1, 4});
  CHECK(validate(s, inst).empty());
}

TEST_CASE("exhaustive search guard") {
  const auto inst = golden_instance();
  CHECK_THROWS_AS(brute_force(inst, Scheme::max_qoc, 1), ConfigError);
}

TEST_CASE("node limit marks the result as unproven") {
  const auto inst = golden_instance();
  const auto full = solve(inst, Scheme::max_qoc);
  REQUIRE(full.nodes > 2);
  SolveOptions opts;
  opts.node_limit = full.nodes - 1;
  const auto s = solve(inst, Scheme::max_qoc, opts);
  CHECK_FALSE(s.proven_optimal);
  CHECK(validate(s, inst).empty());
  opts.node_limit = 0;
  CHECK_THROWS_AS(solve(inst, Scheme::max_qoc, opts), SimulationError);
}

TEST_CASE("repeated solves are identical") {
  std::mt19937_64 rng(5);
  const auto inst = qoc::testing::random_instance(rng);
  for (Scheme s : all_schemes) {
    std::string e1, e2;
    Solution a, b;
    try {
      a = solve(inst, s);
    } catch (const InfeasibleError& e) {
      e1 = e.binding();
    }
    try {
      b = solve(inst, s);
    } catch (const InfeasibleError& e) {
      e2 = e.binding();
    }
    CHECK(e1 == e2);
    CHECK(a.window_vector() == b.window_vector());
    CHECK(a.nodes == b.nodes);
    CHECK(a.ul_alloc == b.ul_alloc);
  }
}

}  // TEST_SUITE
