// SPDX-License-Identifier: Apache-2.0

#include "alloc_detail.hpp"

#include <algorithm>
#include <numeric>

namespace qoc::alloc::detail {

Packer::Packer(const Instance& instance, network::SlotKind kind)
    : kind_(kind),
      phi_(instance.phi()),
      need_(kind == network::SlotKind::uplink ? instance.ul_need : instance.dl_need),
      capacity_(static_cast<std::size_t>(phi_) + 1, 0) {
  for (int j = 1; j <= phi_; ++j) {
    if (instance.frame.kind(j) == kind) {
      capacity_[j] = instance.frame.capacity;
      slots_.push_back(j);
    }
  }
}

bool Packer::feasible(const std::vector<Window>& windows, const FreePool& pool) const {
  return run(windows, pool, nullptr);
}

std::optional<std::vector<std::vector<int>>> Packer::pack(const std::vector<Window>& windows) const {
  std::vector<std::vector<int>> out(windows.size(), std::vector<int>(static_cast<std::size_t>(phi_) + 1, 0));
  if (!run(windows, FreePool{}, &out)) return std::nullopt;
  return out;
}

bool Packer::run(const std::vector<Window>& windows, const FreePool& pool,
                 std::vector<std::vector<int>>* out) const {
  std::vector<int> cap = capacity_;
  struct Pending {
    Job job;
    int owner;  ///< robot index, -1 for the pool
  };
  std::vector<Pending> jobs;

  auto reserve = [&](int slot, int amount, int owner) {
    if (!is_slot(slot)) return false;
    cap[slot] -= amount;
    if (cap[slot] < 0) return false;
    if (out && owner >= 0) (*out)[owner][slot] += amount;
    return true;
  };

  for (std::size_t r = 0; r < windows.size(); ++r) {
    const Window& w = windows[r];
    const int owner = static_cast<int>(r);
    if (w.first > w.last) return false;
    if (w.first == w.last) {
      if (!reserve(w.first, need_, owner)) return false;
      continue;
    }
    if (need_ < 2) return false;
    if (!reserve(w.first, 1, owner) || !reserve(w.last, 1, owner)) return false;
    if (need_ > 2) jobs.push_back({{w.first, w.last, need_ - 2}, owner});
  }

  if (pool.count > 0) {
    std::vector<int> cover = pool.cover;
    std::sort(cover.begin(), cover.end());
    cover.erase(std::unique(cover.begin(), cover.end()), cover.end());
    const int total = pool.count * need_;
    if (static_cast<int>(cover.size()) > total) return false;
    for (int c : cover) {
      if (c < pool.first || c > pool.last || !reserve(c, 1, -1)) return false;
    }
    const int rest = total - static_cast<int>(cover.size());
    if (rest > 0) jobs.push_back({{pool.first, pool.last, rest}, -1});
  } else if (!pool.cover.empty()) {
    return false;
  }

  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Job& x = jobs[a].job;
    const Job& y = jobs[b].job;
    if (x.last != y.last) return x.last < y.last;
    if (x.first != y.first) return x.first < y.first;
    return a < b;
  });

  for (int s = 1; s <= phi_; ++s) {
    for (std::size_t k : order) {
      if (cap[s] == 0) break;
      Pending& p = jobs[k];
      if (p.job.demand == 0 || s < p.job.first || s > p.job.last) continue;
      const int take = std::min(cap[s], p.job.demand);
      cap[s] -= take;
      p.job.demand -= take;
      if (out && p.owner >= 0) (*out)[p.owner][s] += take;
    }
    for (const Pending& p : jobs) {
      if (p.job.last == s && p.job.demand > 0) return false;
    }
  }
  return std::all_of(jobs.begin(), jobs.end(), [](const Pending& p) { return p.job.demand == 0; });
}

std::vector<Window> windows_of(const network::TddFrame& frame, network::SlotKind kind, int lo, int hi) {
  std::vector<int> slots;
  for (int j = std::max(lo, 1); j <= std::min(hi, frame.slot_count()); ++j) {
    if (frame.kind(j) == kind) slots.push_back(j);
  }
  std::vector<Window> out;
  for (std::size_t a = 0; a < slots.size(); ++a) {
    for (std::size_t b = a; b < slots.size(); ++b) out.push_back({slots[a], slots[b]});
  }
  return out;
}

WindowValue window_value(const Instance& instance, Scheme scheme, int A, int B, const Window& dl) {
  WindowValue v;
  v.e2e = dl.last - A;
  const int alloc = dl.first - B;
  if (alloc < 1) return v;
  const auto idx = instance.table.find(v.e2e, alloc);
  if (!idx) return v;
  v.qoc = instance.table.entries[*idx].qoc;
  switch (scheme) {
    case Scheme::max_qoc: v.score = v.qoc; break;
    case Scheme::min_delay: v.score = -v.e2e; break;
    case Scheme::max_delay: v.score = v.e2e; break;
    case Scheme::min_delay_stable:
      if (!(v.qoc > 0.0)) return v;
      v.score = -v.e2e;
      break;
  }
  v.admissible = true;
  return v;
}

std::vector<int> interleave(const std::vector<Window>& ul, const std::vector<Window>& dl) {
  std::vector<int> vec;
  vec.reserve(ul.size() * 4);
  for (std::size_t i = 0; i < ul.size(); ++i) {
    vec.insert(vec.end(), {ul[i].first, ul[i].last, dl[i].first, dl[i].last});
  }
  return vec;
}

Key make_key(const Instance& instance, Scheme scheme, const std::vector<Window>& ul,
             const std::vector<Window>& dl) {
  int A = ul.front().first;
  int B = ul.front().last;
  for (const Window& w : ul) {
    A = std::min(A, w.first);
    B = std::max(B, w.last);
  }
  Key k;
  for (const Window& w : dl) {
    const WindowValue v = window_value(instance, scheme, A, B, w);
    k.score += v.score;
    k.total_e2e += v.e2e;
  }
  k.vec = interleave(ul, dl);
  return k;
}

bool key_preferred(const Key& a, const Key& b) {
  if (a.score > b.score + kScoreEps) return true;
  if (a.score < b.score - kScoreEps) return false;
  if (a.total_e2e != b.total_e2e) return a.total_e2e < b.total_e2e;
  return a.vec < b.vec;
}

void throw_infeasible(Scheme scheme, bool any_uplink, bool any_downlink) {
  if (!any_uplink) {
    throw InfeasibleError("13", "no uplink placement fits the per-slot capacity");
  }
  if (!any_downlink) {
    throw InfeasibleError("edge-gating",
                          "no downlink placement fits after the last uplink slot");
  }
  if (scheme == Scheme::min_delay_stable) {
    throw InfeasibleError("qoc-positive", "no allocation gives every robot a positive QoC");
  }
  throw InfeasibleError("22", "no feasible allocation maps to a QoC table entry");
}

}  // namespace qoc::alloc::detail
