// SPDX-License-Identifier: Apache-2.0

// Branch-and-bound over per-robot slot windows.
//
// For every pair (A, B) of global first/last uplink slots the uplink side is
// fixed to its lexicographically smallest packable window tuple; objectives
// only see A and B. Downlink windows are then chosen as a sorted multiset
// (robots are interchangeable), pruned by packing feasibility and by an
// upper bound that relaxes capacity to nested prefix counts.

#include <algorithm>
#include <limits>
#include <numeric>

#include "alloc_detail.hpp"

namespace qoc::alloc {

namespace {

using detail::FreePool;
using detail::Key;
using detail::kScoreEps;
using detail::Packer;
using detail::WindowValue;
using network::SlotKind;

class Search {
 public:
  Search(const Instance& instance, Scheme scheme, const SolveOptions& options)
      : inst_(instance),
        scheme_(scheme),
        options_(options),
        up_(instance, SlotKind::uplink),
        down_(instance, SlotKind::downlink) {}

  void run() {
    const auto& ul_slots = up_.slots();
    for (std::size_t a = 0; a < ul_slots.size() && !aborted_; ++a) {
      for (std::size_t b = a; b < ul_slots.size() && !aborted_; ++b) {
        const auto ul = lexmin_uplink(ul_slots[a], ul_slots[b]);
        if (!ul) continue;
        any_uplink_ = true;
        search_downlink(ul_slots[a], ul_slots[b], *ul);
      }
    }
  }

  bool found() const { return found_; }
  bool aborted() const { return aborted_; }
  bool any_uplink() const { return any_uplink_; }
  bool any_downlink() const { return any_downlink_; }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<Window>& best_ul() const { return best_ul_; }
  const std::vector<Window>& best_dl() const { return best_dl_; }

 private:
  std::optional<std::vector<Window>> lexmin_uplink(int A, int B) const {
    const int n = inst_.n_robots;
    const auto candidates = detail::windows_of(inst_.frame, SlotKind::uplink, A, B);
    std::vector<Window> chosen;
    for (int i = 0; i < n; ++i) {
      bool placed = false;
      for (const Window& w : candidates) {
        chosen.push_back(w);
        FreePool pool{n - i - 1, A, B, {}};
        if (std::none_of(chosen.begin(), chosen.end(), [&](const Window& c) { return c.first == A; })) {
          pool.cover.push_back(A);
        }
        if (std::none_of(chosen.begin(), chosen.end(), [&](const Window& c) { return c.last == B; })) {
          pool.cover.push_back(B);
        }
        if (up_.feasible(chosen, pool)) {
          placed = true;
          break;
        }
        chosen.pop_back();
      }
      if (!placed) return std::nullopt;
    }
    return chosen;
  }

  void search_downlink(int A, int B, const std::vector<Window>& ul) {
    const int n = inst_.n_robots;
    const int phi = inst_.phi();
    if (!down_.feasible({}, FreePool{n, B + 1, phi, {}})) return;
    any_downlink_ = true;

    A_ = A;
    ul_ = &ul;
    windows_.clear();
    values_.clear();
    for (const Window& w : detail::windows_of(inst_.frame, SlotKind::downlink, B + 1, phi)) {
      const WindowValue v = detail::window_value(inst_, scheme_, A, B, w);
      if (!v.admissible) continue;
      windows_.push_back(w);
      values_.push_back(v);
    }
    if (windows_.empty()) return;

    order_.resize(windows_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t x, std::size_t y) { return values_[x].score > values_[y].score; });

    // Nested prefix capacity: robots whose downlink ends by the k-th slot
    // after B must fit into the first k+1 of those slots.
    dl_after_.clear();
    for (int j = B + 1; j <= phi; ++j) {
      if (down_.is_slot(j)) dl_after_.push_back(j);
    }
    prefix_cap_.assign(dl_after_.size(), 0);
    for (std::size_t k = 0; k < dl_after_.size(); ++k) {
      prefix_cap_[k] = static_cast<int>((static_cast<long long>(inst_.frame.capacity) * (k + 1)) /
                                        inst_.dl_need);
    }
    used_.assign(dl_after_.size(), 0);
    chosen_.clear();
    dfs(0, 0, 0.0, 0);
  }

  std::size_t position(int slot) const {
    return static_cast<std::size_t>(std::lower_bound(dl_after_.begin(), dl_after_.end(), slot) -
                                    dl_after_.begin());
  }

  /// Best score obtainable by `remaining` more robots using windows with
  /// index >= from, under the prefix capacity relaxation. -inf if they
  /// cannot all be placed.
  double upper_bound(int remaining, std::size_t from) const {
    if (remaining == 0) return 0.0;
    const double none = -std::numeric_limits<double>::infinity();
    std::vector<double> best(dl_after_.size(), none);
    for (std::size_t t = from; t < windows_.size(); ++t) {
      const std::size_t k = position(windows_[t].last);
      best[k] = std::max(best[k], values_[t].score);
    }
    std::vector<std::size_t> ks;
    for (std::size_t k = 0; k < best.size(); ++k) {
      if (best[k] != none) ks.push_back(k);
    }
    std::stable_sort(ks.begin(), ks.end(), [&](std::size_t x, std::size_t y) { return best[x] > best[y]; });
    std::vector<int> used = used_;
    double total = 0.0;
    for (std::size_t k : ks) {
      int room = std::numeric_limits<int>::max();
      for (std::size_t q = k; q < used.size(); ++q) room = std::min(room, prefix_cap_[q] - used[q]);
      const int take = std::min(remaining, std::max(room, 0));
      if (take == 0) continue;
      for (std::size_t q = k; q < used.size(); ++q) used[q] += take;
      total += take * best[k];
      remaining -= take;
      if (remaining == 0) return total;
    }
    return none;
  }

  /// True when the known prefix of the window vector (robots 0..depth fully,
  /// plus robot depth+1's uplink window) is lexicographically greater than
  /// the incumbent's.
  bool prefix_after_incumbent(int depth) const {
    const auto& ul = *ul_;
    std::vector<int> prefix;
    for (int k = 0; k <= depth; ++k) {
      prefix.insert(prefix.end(), {ul[k].first, ul[k].last, chosen_[k].first, chosen_[k].last});
    }
    if (depth + 1 < static_cast<int>(ul.size())) {
      prefix.insert(prefix.end(), {ul[depth + 1].first, ul[depth + 1].last});
    }
    for (std::size_t p = 0; p < prefix.size(); ++p) {
      if (prefix[p] != best_.vec[p]) return prefix[p] > best_.vec[p];
    }
    return false;
  }

  void dfs(int depth, std::size_t from, double score, int e2e) {
    const int n = inst_.n_robots;
    const int remaining = n - depth - 1;
    for (std::size_t j : order_) {
      if (j < from) continue;
      if (++nodes_ > options_.node_limit) {
        aborted_ = true;
        return;
      }
      const Window& w = windows_[j];
      chosen_.push_back(w);
      if (down_.feasible(chosen_, FreePool{remaining, w.first, inst_.phi(), {}})) {
        const std::size_t k = position(w.last);
        for (std::size_t q = k; q < used_.size(); ++q) ++used_[q];
        const double s = score + values_[j].score;
        const int d = e2e + values_[j].e2e;
        if (remaining == 0) {
          offer();
        } else if (!prunable(depth, s + upper_bound(remaining, j), d + remaining * (w.first - A_))) {
          dfs(depth + 1, j, s, d);
        }
        for (std::size_t q = k; q < used_.size(); ++q) --used_[q];
      }
      chosen_.pop_back();
      if (aborted_) return;
    }
  }

  bool prunable(int depth, double bound, int e2e_lower) const {
    if (!found_) return bound == -std::numeric_limits<double>::infinity();
    if (bound < best_.score - kScoreEps) return true;
    if (bound > best_.score + kScoreEps) return false;
    if (e2e_lower > best_.total_e2e) return true;
    return e2e_lower == best_.total_e2e && prefix_after_incumbent(depth);
  }

  void offer() {
    Key key = detail::make_key(inst_, scheme_, *ul_, chosen_);
    if (!found_ || detail::key_preferred(key, best_)) {
      found_ = true;
      best_ = std::move(key);
      best_ul_ = *ul_;
      best_dl_ = chosen_;
    }
  }

  const Instance& inst_;
  Scheme scheme_;
  SolveOptions options_;
  Packer up_;
  Packer down_;

  int A_ = 0;
  const std::vector<Window>* ul_ = nullptr;
  std::vector<Window> windows_;
  std::vector<WindowValue> values_;
  std::vector<std::size_t> order_;
  std::vector<int> dl_after_;
  std::vector<int> prefix_cap_;
  std::vector<int> used_;
  std::vector<Window> chosen_;

  bool found_ = false;
  bool aborted_ = false;
  bool any_uplink_ = false;
  bool any_downlink_ = false;
  std::uint64_t nodes_ = 0;
  Key best_;
  std::vector<Window> best_ul_;
  std::vector<Window> best_dl_;
};

}  // namespace

Solution solve(const Instance& instance, Scheme scheme, const SolveOptions& options) {
  instance.validate();
  Search search(instance, scheme, options);
  search.run();
  if (!search.found()) {
    if (search.aborted()) throw SimulationError("allocator: node limit reached before any feasible allocation");
    detail::throw_infeasible(scheme, search.any_uplink(), search.any_downlink());
  }
  Solution s = materialize(instance, scheme, search.best_ul(), search.best_dl());
  s.nodes = search.nodes();
  s.proven_optimal = !search.aborted();
  return s;
}

}  // namespace qoc::alloc
