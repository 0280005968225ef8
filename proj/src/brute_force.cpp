// SPDX-License-Identifier: Apache-2.0

// Exhaustive reference solver. Shares only the objective definition and the
// preference order with the branch-and-bound; packing feasibility is decided
// by max-flow instead of earliest-deadline packing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "alloc_detail.hpp"

namespace qoc::alloc {

namespace {

using network::SlotKind;

class MaxFlow {
 public:
  explicit MaxFlow(int n) : graph_(static_cast<std::size_t>(n)) {}

  void add_edge(int u, int v, long long cap) {
    graph_[u].push_back({v, cap, static_cast<int>(graph_[v].size())});
    graph_[v].push_back({u, 0, static_cast<int>(graph_[u].size()) - 1});
  }

  long long run(int s, int t) {
    long long flow = 0;
    while (bfs(s, t)) {
      iter_.assign(graph_.size(), 0);
      while (long long f = dfs(s, t, std::numeric_limits<long long>::max())) flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    int to;
    long long cap;
    int rev;
  };

  bool bfs(int s, int t) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const Edge& e : graph_[u]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long dfs(int u, int t, long long f) {
    if (u == t) return f;
    for (int& i = iter_[u]; i < static_cast<int>(graph_[u].size()); ++i) {
      Edge& e = graph_[u][i];
      if (e.cap > 0 && level_[u] < level_[e.to]) {
        const long long d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          graph_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

/// Whether every robot's need fits inside its window with at least one PRB
/// at each window end.
bool packable(const Instance& inst, SlotKind kind, const std::vector<Window>& windows) {
  const int phi = inst.phi();
  const int need = kind == SlotKind::uplink ? inst.ul_need : inst.dl_need;
  std::vector<long long> cap(static_cast<std::size_t>(phi) + 1, 0);
  for (int j = 1; j <= phi; ++j) {
    if (inst.frame.kind(j) == kind) cap[j] = inst.frame.capacity;
  }
  const int n = static_cast<int>(windows.size());
  std::vector<long long> rest(n, 0);
  for (int i = 0; i < n; ++i) {
    const Window& w = windows[i];
    if (inst.frame.kind(w.first) != kind || inst.frame.kind(w.last) != kind) return false;
    if (w.first == w.last) {
      cap[w.first] -= need;
    } else {
      if (need < 2) return false;
      cap[w.first] -= 1;
      cap[w.last] -= 1;
      rest[i] = need - 2;
    }
  }
  if (std::any_of(cap.begin(), cap.end(), [](long long c) { return c < 0; })) return false;

  const int source = 0;
  const int sink = n + phi + 1;
  MaxFlow g(n + phi + 2);
  long long demand = 0;
  for (int i = 0; i < n; ++i) {
    if (rest[i] == 0) continue;
    demand += rest[i];
    g.add_edge(source, 1 + i, rest[i]);
    for (int j = windows[i].first; j <= windows[i].last; ++j) {
      if (cap[j] > 0) g.add_edge(1 + i, 1 + n + (j - 1), rest[i]);
    }
  }
  for (int j = 1; j <= phi; ++j) {
    if (cap[j] > 0) g.add_edge(1 + n + (j - 1), sink, cap[j]);
  }
  return g.run(source, sink) == demand;
}

std::vector<Window> all_windows(const network::TddFrame& frame, SlotKind kind, int lo) {
  std::vector<Window> out;
  for (int a = lo; a <= frame.slot_count(); ++a) {
    if (frame.kind(a) != kind) continue;
    for (int b = a; b <= frame.slot_count(); ++b) {
      if (frame.kind(b) == kind) out.push_back({a, b});
    }
  }
  return out;
}

/// Calls fn for every ordered n-tuple drawn from `pool`, in lexicographic
/// order of pool indices.
template <class Fn>
void for_each_tuple(const std::vector<Window>& pool, int n, Fn&& fn) {
  if (pool.empty()) return;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<Window> tuple(static_cast<std::size_t>(n), pool[0]);
  while (true) {
    for (int i = 0; i < n; ++i) tuple[i] = pool[idx[i]];
    fn(tuple);
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == pool.size()) idx[pos--] = 0;
    if (pos < 0) return;
  }
}

}  // namespace

Solution brute_force(const Instance& instance, Scheme scheme, std::uint64_t max_candidates) {
  instance.validate();
  const int n = instance.n_robots;
  const auto ul_pool = all_windows(instance.frame, SlotKind::uplink, 1);

  double space = std::pow(static_cast<double>(ul_pool.size()), n);
  for (const Window& w : ul_pool) {
    space += std::pow(static_cast<double>(all_windows(instance.frame, SlotKind::downlink, w.last + 1).size()), n);
  }
  if (space > static_cast<double>(max_candidates)) {
    throw ConfigError("brute force: search space of " + format_decimal(space) +
                      " candidates exceeds the guard");
  }

  std::uint64_t visited = 0;
  std::map<std::pair<int, int>, std::vector<Window>> uplinks;
  for_each_tuple(ul_pool, n, [&](const std::vector<Window>& ul) {
    ++visited;
    if (!packable(instance, SlotKind::uplink, ul)) return;
    int A = ul[0].first;
    int B = ul[0].last;
    for (const Window& w : ul) {
      A = std::min(A, w.first);
      B = std::max(B, w.last);
    }
    auto [it, inserted] = uplinks.try_emplace({A, B}, ul);
    if (!inserted && ul < it->second) it->second = ul;
  });

  bool any_downlink = false;
  bool found = false;
  detail::Key best;
  std::vector<Window> best_ul, best_dl;
  for (const auto& [span, ul] : uplinks) {
    const auto [A, B] = span;
    const auto dl_pool = all_windows(instance.frame, SlotKind::downlink, B + 1);
    for_each_tuple(dl_pool, n, [&](const std::vector<Window>& dl) {
      ++visited;
      if (!packable(instance, SlotKind::downlink, dl)) return;
      any_downlink = true;
      for (const Window& w : dl) {
        if (!detail::window_value(instance, scheme, A, B, w).admissible) return;
      }
      detail::Key key = detail::make_key(instance, scheme, ul, dl);
      if (!found || detail::key_preferred(key, best)) {
        found = true;
        best = std::move(key);
        best_ul = ul;
        best_dl = dl;
      }
    });
  }
  if (!found) detail::throw_infeasible(scheme, !uplinks.empty(), any_downlink);

  Solution s = materialize(instance, scheme, best_ul, best_dl);
  s.nodes = visited;
  return s;
}

}  // namespace qoc::alloc
