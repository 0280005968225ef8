// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/network.hpp"
#include "qoc/qoc_table.hpp"

namespace qoc::alloc {

/// One slot/PRB allocation problem.
///
/// Every robot needs ul_need PRBs in uplink slots and dl_need PRBs in
/// downlink slots. The QoC table must contain an entry for every (e2e, alloc)
/// slot pair the frame can realize.
struct Instance {
  network::TddFrame frame;
  int n_robots = 1;
  int ul_need = 1;
  int dl_need = 1;
  table::QocTable table;
  int big_m = 0;  ///< 0 selects phi + 1

  int phi() const { return frame.slot_count(); }
  int effective_big_m() const { return big_m > 0 ? big_m : phi() + 1; }

  /// Throws ConfigError for malformed data and InfeasibleError when the
  /// aggregate capacity check fails.
  void validate() const;
};

enum class Scheme { max_qoc, min_delay, max_delay, min_delay_stable };

inline constexpr std::array<Scheme, 4> all_schemes{Scheme::max_qoc, Scheme::min_delay,
                                                   Scheme::max_delay, Scheme::min_delay_stable};

/// Command-line name, e.g. "max-qoc".
std::string_view scheme_name(Scheme s);
/// Report label, e.g. "Maximize reliability" for max-delay.
std::string_view scheme_label(Scheme s);
/// 1-based scheme number used in reports.
int scheme_number(Scheme s);
Scheme scheme_from_string(std::string_view text);

/// Inclusive range of 1-based slot indices.
struct Window {
  int first = 0;
  int last = 0;

  auto operator<=>(const Window&) const = default;
};

struct Solution {
  Scheme scheme = Scheme::max_qoc;
  IntMatrix ul_alloc;  ///< X, n_robots x phi
  IntMatrix dl_alloc;  ///< Y
  IntMatrix ul_sched;  ///< Z^UL
  IntMatrix dl_sched;  ///< Z^DL
  std::vector<int> first_ul, last_ul, first_dl, last_dl;
  std::vector<int> e2e_slots, alloc_slots;
  std::vector<double> e2e_delay_ms, alloc_delay_ms;
  std::vector<int> delay_choice;  ///< index into the table entries
  std::vector<double> qoc;
  double objective_value = 0.0;  ///< sum of Q, or sum of e2e delay in ms
  double total_qoc = 0.0;
  int total_e2e_slots = 0;
  bool proven_optimal = true;
  std::uint64_t nodes = 0;  ///< search nodes expanded (deterministic)

  int n_robots() const { return static_cast<int>(first_ul.size()); }

  /// Robot-major (first_ul, last_ul, first_dl, last_dl) vector used for
  /// tie-breaking.
  std::vector<int> window_vector() const;
};

/// Total preference order shared by solve and brute_force: better objective
/// (1e-9 tolerance on QoC sums), then lower total e2e delay, then the
/// lexicographically smaller window vector.
bool preferred(const Solution& a, const Solution& b);

struct SolveOptions {
  std::uint64_t node_limit = 20'000'000;
};

/// Exact branch-and-bound. When the node limit is reached the best solution
/// found so far is returned with proven_optimal = false, or SimulationError
/// is thrown when none was found.
Solution solve(const Instance& instance, Scheme scheme, const SolveOptions& options = {});

/// Exhaustive reference solver. Throws ConfigError when the enumeration
/// would exceed max_candidates window assignments.
Solution brute_force(const Instance& instance, Scheme scheme,
                     std::uint64_t max_candidates = 10'000'000);

/// Builds the full Solution (PRB matrices, delays, QoC) for the given
/// per-robot windows, or throws InfeasibleError if they cannot be packed.
Solution materialize(const Instance& instance, Scheme scheme, const std::vector<Window>& ul,
                     const std::vector<Window>& dl);

struct Violation {
  std::string constraint;  ///< "13", "14", "15-16", "17-18", "19", "20-21", "22", ...
  std::string detail;

  bool operator==(const Violation&) const = default;
};

/// Checks a solution against the instance without trusting any solver.
std::vector<Violation> validate(const Solution& solution, const Instance& instance);

/// Mixed-integer model of the instance in CPLEX LP format. The objective is
/// expressed in the same units as Solution::objective_value.
std::string export_lp(const Instance& instance, Scheme scheme);

}  // namespace qoc::alloc
