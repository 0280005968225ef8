// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qoc/consensus.hpp"
#include "qoc/network.hpp"

namespace qoc::table {

enum class SweepKind { deterministic_delay, reliability_only, stochastic };

std::string_view to_string(SweepKind kind);

/// One tradeoff curve: mean AUC (and its standard error) along a delay or
/// reliability axis.
struct SweepResult {
  SweepKind kind = SweepKind::deterministic_delay;
  std::vector<double> axis;
  std::vector<double> auc;
  std::vector<double> std_error;
  int n_runs = 0;
  std::uint64_t seed = 0;
};

/// How the stochastic curve realizes loop failures.
enum class StochasticMode {
  fixed_pair,     ///< fixed (delay, reliability) per point, Bernoulli drops
  per_iteration,  ///< fresh clipped backend draw per loop iteration
};

// Every sweep point reuses config.seed, so all points see the same per-run
// random streams.

/// AUC vs loop delay with no drops. Delays must be strictly increasing
/// within [0, period].
SweepResult sweep_deterministic(const consensus::SimConfig& config,
                                const std::vector<double>& delays_ms, int n_runs);

/// AUC vs success probability with zero delay. Reliabilities must be
/// strictly increasing within (0, 1].
SweepResult sweep_reliability(const consensus::SimConfig& config,
                              const std::vector<double>& reliabilities, int n_runs);

/// AUC vs delay where the success probability is loop_reliability(model, d).
SweepResult sweep_stochastic(const consensus::SimConfig& config, const network::DelayModel& model,
                             const std::vector<double>& delays_ms, int n_runs,
                             StochasticMode mode = StochasticMode::fixed_pair);

/// How table rows are keyed.
enum class TableMode {
  pair,          ///< (e2e, alloc) slot-delay pairs
  single_index,  ///< e2e only; reliability evaluated at alloc = e2e - 1 slot (0 for e2e = 1)
};

std::string_view to_string(TableMode mode);
TableMode table_mode_from_string(std::string_view text);

struct QocEntry {
  int e2e_slots = 0;
  int alloc_slots = 0;
  double auc = 0.0;
  double std_error = 0.0;
  double qoc = 0.0;
};

/// Discretized QoC table consumed by the allocator.
///
/// Entries are sorted by (e2e_slots, alloc_slots). qoc is 0 for every entry
/// whose AUC reaches 1; elsewhere it is (max_auc - auc) / max_auc.
struct QocTable {
  TableMode mode = TableMode::pair;
  double slot_ms = 0.5;
  std::string frame_description;
  network::DelayModel model;
  std::uint64_t seed = 0;
  int n_runs = 0;
  double max_auc = 0.0;
  std::vector<QocEntry> entries;

  /// Index of the entry matching the delays, or nullopt. In single-index
  /// mode only the e2e delay is matched.
  std::optional<std::size_t> find(int e2e_slots, int alloc_slots) const;

  std::vector<double> e2e_delays_ms() const;
  std::vector<double> alloc_delays_ms() const;

  /// Recomputes max_auc and every qoc value from the stored AUCs.
  void normalize();
};

/// max over stable entries (auc < 1), and 1.0 when any entry is unstable.
double normalizer(const std::vector<QocEntry>& entries);

/// (e2e, alloc) slot pairs realizable under the frame: some uplink slot f,
/// uplink slot l >= f, downlink slots F <= G with F > l, e2e = G - f and
/// alloc = F - l. Sorted.
std::vector<std::pair<int, int>> realizable_pairs(const network::TddFrame& frame);

/// Simulates every realizable pair and normalizes. Throws SimulationError
/// when the frame admits no pair or a pair's e2e delay exceeds the period.
QocTable build_qoc_table(const consensus::SimConfig& config, const network::DelayModel& model,
                         const network::TddFrame& frame, int n_runs,
                         TableMode mode = TableMode::pair);

/// Builds a table directly from AUC values (used for crafted instances).
QocTable table_from_auc(const network::TddFrame& frame, std::vector<QocEntry> entries,
                        TableMode mode = TableMode::pair);

/// Text serialization: `#`-prefixed header lines, then CSV rows
/// e2e_ms,alloc_ms,auc,stderr,qoc with 12 significant digits.
std::string serialize(const QocTable& table);
QocTable parse_table(std::string_view text);

}  // namespace qoc::table
