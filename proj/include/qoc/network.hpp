// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qoc::network {

/// Backend (core + edge) delay distribution together with the per-direction
/// radio packet-success probabilities.
///
/// The Gaussian body is described by `mean_ms`/`std_ms`. The CDF used for
/// reliability is the Gaussian truncated to [lower_ms, upper_ms] and
/// renormalized; sampling clips instead (see sample_backend_delay).
struct DelayModel {
  double mean_ms = 0.5;
  double std_ms = 1.0;
  double lower_ms = 0.0;
  double upper_ms = 10.0;
  double p_ul = 0.99;  ///< uplink packet success probability
  double p_dl = 0.99;  ///< downlink packet success probability

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

/// F_back(d) of the truncated-renormalized Gaussian. 0 at and below the
/// lower bound, 1 at and above the upper bound.
double backend_cdf(const DelayModel& model, double d_ms);

/// End-to-end loop success probability when the backend has `d_alloc_ms`
/// to deliver the control packet: F_back(d_alloc) * p_ul * p_dl.
double loop_reliability(const DelayModel& model, double d_alloc_ms);

/// Draws one backend delay: Gaussian(mean, std) clipped to [lower, upper].
/// Clipping puts point masses at both bounds, so the empirical CDF of these
/// draws differs from backend_cdf near the ends.
double sample_backend_delay(const DelayModel& model, std::mt19937_64& rng);

/// CDF of the clipped (not renormalized) Gaussian that sample_backend_delay
/// draws from.
double clipped_cdf(const DelayModel& model, double d_ms);

enum class SlotKind : std::uint8_t { uplink, downlink };

char slot_letter(SlotKind kind);

/// TDD frame: a repeated pattern of uplink/downlink slots.
struct TddFrame {
  std::vector<SlotKind> pattern;
  int repetitions = 1;
  int numerology = 1;  ///< mu; slot duration is 1 ms / 2^mu
  int capacity = 133;  ///< PRBs per slot (R)

  /// Parses a pattern string such as "UDUUD". Throws ConfigError on any
  /// character other than U/D.
  static TddFrame from_pattern(std::string_view pattern, int repetitions, int numerology,
                               int capacity);

  double slot_duration_ms() const;
  int slot_count() const { return static_cast<int>(pattern.size()) * repetitions; }
  std::string pattern_string() const;

  /// Kind of 1-based slot j.
  SlotKind kind(int slot) const;

  /// Requires a non-empty pattern with at least one slot of each kind,
  /// positive repetitions and capacity, numerology in [0, 6].
  void validate() const;
};

struct ExpandedSlot {
  int index = 0;  ///< 1-based
  SlotKind kind = SlotKind::uplink;
  double start_ms = 0.0;

  bool operator==(const ExpandedSlot&) const = default;
};

/// Expands the repeated pattern into phi slots with their start times.
/// Only an empty pattern is rejected here; missing directions are a frame
/// validation concern.
std::vector<ExpandedSlot> expand_tdd(const TddFrame& frame);

/// One row of an MCS index table.
struct McsEntry {
  int index = 0;
  int modulation_order = 0;  ///< Qm, bits per symbol
  double code_rate_x1024 = 0.0;

  double code_rate() const { return code_rate_x1024 / 1024.0; }
};

/// MCS index -> (modulation order, code rate) lookup loaded from a text file.
class McsTable {
 public:
  McsTable() = default;
  explicit McsTable(std::vector<McsEntry> entries);

  /// Whitespace-separated records `index modulation_order rate_x1024`; `#`
  /// starts a comment.
  static McsTable parse(std::string_view text);
  static McsTable load(const std::string& path);

  const McsEntry& at(int index) const;
  const std::vector<McsEntry>& entries() const { return entries_; }

 private:
  std::vector<McsEntry> entries_;
};

/// Path of the bundled 64QAM MCS table (set at build time).
std::string default_mcs_table_path();

/// Per-direction link parameters for the PRB calculation.
struct LinkBudget {
  double packet_bits = 5120.0;
  double periodicity_ms = 10.0;
  int mcs_index = 7;
  int modulation_order = 2;
  double code_rate = 526.0 / 1024.0;
  double overhead = 0.08;
  int n_layers = 1;
  double scaling = 1.0;
  int n_carriers = 1;
  int max_prbs = 133;

  /// Fills modulation_order and code_rate from the table row for mcs_index.
  void apply_mcs(const McsTable& table);
  void validate() const;
};

struct PrbRequirement {
  int prbs = 0;
  double bits_per_prb_slot = 0.0;
};

/// Payload bits one PRB carries in one slot:
/// 12 subcarriers * 14 symbols * Qm * rate * layers * scaling * (1 - OH) * J.
double bits_per_prb_slot(const LinkBudget& budget);

/// PRBs needed to carry one message inside a single slot. Throws ConfigError
/// when the requirement exceeds max_prbs or the frame's per-slot capacity.
PrbRequirement prb_requirement(const LinkBudget& budget, const TddFrame& frame);

}  // namespace qoc::network
