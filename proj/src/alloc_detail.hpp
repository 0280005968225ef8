// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "qoc/allocator.hpp"

namespace qoc::alloc::detail {

inline constexpr double kScoreEps = 1e-9;

/// Units of one direction that must be placed inside [first, last].
struct Job {
  int first = 0;
  int last = 0;
  int demand = 0;
};

/// A pool of interchangeable robots whose windows are not fixed yet. Their
/// units may go anywhere in [first, last]; every slot in `cover` must receive
/// at least one of them.
struct FreePool {
  int count = 0;
  int first = 0;
  int last = 0;
  std::vector<int> cover;
};

/// Direction-specific packing data for one instance.
class Packer {
 public:
  Packer(const Instance& instance, network::SlotKind kind);

  int need() const { return need_; }
  network::SlotKind kind() const { return kind_; }
  const std::vector<int>& slots() const { return slots_; }
  bool is_slot(int j) const { return j >= 1 && j <= phi_ && capacity_[j] > 0; }

  /// True when robots with the given windows, plus the free pool, fit the
  /// per-slot capacity with units at both ends of every window.
  bool feasible(const std::vector<Window>& windows, const FreePool& pool) const;

  /// Per-robot per-slot amounts (robot-major, phi + 1 columns, column 0
  /// unused) or nullopt when the windows do not fit.
  std::optional<std::vector<std::vector<int>>> pack(const std::vector<Window>& windows) const;

 private:
  bool run(const std::vector<Window>& windows, const FreePool& pool,
           std::vector<std::vector<int>>* out) const;

  network::SlotKind kind_;
  int phi_ = 0;
  int need_ = 0;
  std::vector<int> capacity_;  ///< index 1..phi, 0 on slots of the other direction
  std::vector<int> slots_;
};

/// All windows [a, b] with a <= b, both endpoints slots of `kind`, and
/// lo <= a, b <= hi. Lexicographic order.
std::vector<Window> windows_of(const network::TddFrame& frame, network::SlotKind kind, int lo, int hi);

/// Per-robot contribution for a downlink window given the global first
/// uplink slot A and last uplink slot B.
struct WindowValue {
  bool admissible = false;
  double score = 0.0;  ///< contribution to the maximized score
  int e2e = 0;
  double qoc = 0.0;
};

WindowValue window_value(const Instance& instance, Scheme scheme, int A, int B, const Window& dl);

/// Comparison key of a complete assignment.
struct Key {
  double score = 0.0;
  int total_e2e = 0;
  std::vector<int> vec;
};

/// Robot-major window vector.
std::vector<int> interleave(const std::vector<Window>& ul, const std::vector<Window>& dl);

/// Score, e2e total and vector of a complete assignment. Scores are summed
/// in robot order.
Key make_key(const Instance& instance, Scheme scheme, const std::vector<Window>& ul,
             const std::vector<Window>& dl);

bool key_preferred(const Key& a, const Key& b);

/// Raises the InfeasibleError for an instance with no solution. `any_uplink`
/// tells whether some uplink span was packable, `any_downlink` whether some
/// packable uplink span also admitted a downlink packing before the QoC > 0
/// filter.
[[noreturn]] void throw_infeasible(Scheme scheme, bool any_uplink, bool any_downlink);

}  // namespace qoc::alloc::detail
