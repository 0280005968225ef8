// SPDX-License-Identifier: Apache-2.0

#include "qoc/allocator.hpp"

#include <algorithm>
#include <cmath>

#include "alloc_detail.hpp"

namespace qoc::alloc {

using network::SlotKind;

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::max_qoc: return "max-qoc";
    case Scheme::min_delay: return "min-delay";
    case Scheme::max_delay: return "max-delay";
    case Scheme::min_delay_stable: return "min-delay-stable";
  }
  return "unknown";
}

std::string_view scheme_label(Scheme s) {
  switch (s) {
    case Scheme::max_qoc: return "Maximize QoC";
    case Scheme::min_delay: return "Minimize delay";
    case Scheme::max_delay: return "Maximize reliability";
    case Scheme::min_delay_stable: return "Minimize delay (QoC > 0)";
  }
  return "unknown";
}

int scheme_number(Scheme s) { return static_cast<int>(s) + 1; }

Scheme scheme_from_string(std::string_view text) {
  for (Scheme s : all_schemes) {
    if (text == scheme_name(s) || text == std::to_string(scheme_number(s))) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(text) + "'");
}

void Instance::validate() const {
  frame.validate();
  if (n_robots < 1) throw ConfigError("instance: n_robots >= 1");
  if (ul_need < 1 || dl_need < 1) throw ConfigError("instance: PRB needs must be >= 1");
  if (big_m != 0 && big_m < phi() + 1) throw ConfigError("instance: big_m >= phi + 1");
  const auto pairs = table::realizable_pairs(frame);
  if (pairs.empty()) throw InfeasibleError("edge-gating", "no downlink slot follows an uplink slot");
  if (table.entries.empty()) throw ConfigError("instance: QoC table is empty");
  if (std::abs(table.slot_ms - frame.slot_duration_ms()) > 1e-12) {
    throw ConfigError("instance: QoC table slot duration differs from the frame's");
  }
  for (const auto& e : table.entries) {
    if (!(e.qoc >= 0.0 && e.qoc <= 1.0)) throw ConfigError("instance: QoC values must lie in [0, 1]");
  }
  for (auto [e2e, alloc] : pairs) {
    if (!table.find(e2e, alloc)) {
      throw ConfigError("instance: QoC table lacks the realizable pair (" + std::to_string(e2e) + ", " +
                        std::to_string(alloc) + ") slots");
    }
  }
  int n_ul = 0;
  int n_dl = 0;
  for (int j = 1; j <= phi(); ++j) (frame.kind(j) == SlotKind::uplink ? n_ul : n_dl) += 1;
  const long long R = frame.capacity;
  if (static_cast<long long>(n_robots) * ul_need > R * n_ul) {
    throw InfeasibleError("13", "aggregate uplink demand N*U exceeds R * #uplink slots");
  }
  if (static_cast<long long>(n_robots) * dl_need > R * n_dl) {
    throw InfeasibleError("13", "aggregate downlink demand N*D exceeds R * #downlink slots");
  }
}

std::vector<int> Solution::window_vector() const {
  std::vector<int> v;
  for (std::size_t i = 0; i < first_ul.size(); ++i) {
    v.insert(v.end(), {first_ul[i], last_ul[i], first_dl[i], last_dl[i]});
  }
  return v;
}

namespace {

double scheme_score(const Solution& s) {
  switch (s.scheme) {
    case Scheme::max_qoc: return s.total_qoc;
    case Scheme::max_delay: return s.total_e2e_slots;
    default: return -static_cast<double>(s.total_e2e_slots);
  }
}

}  // namespace

bool preferred(const Solution& a, const Solution& b) {
  return detail::key_preferred({scheme_score(a), a.total_e2e_slots, a.window_vector()},
                               {scheme_score(b), b.total_e2e_slots, b.window_vector()});
}

Solution materialize(const Instance& instance, Scheme scheme, const std::vector<Window>& ul,
                     const std::vector<Window>& dl) {
  const int n = instance.n_robots;
  if (static_cast<int>(ul.size()) != n || static_cast<int>(dl.size()) != n) {
    throw ConfigError("materialize: one uplink and one downlink window per robot");
  }
  const int phi = instance.phi();
  const detail::Packer up(instance, SlotKind::uplink);
  const detail::Packer down(instance, SlotKind::downlink);
  const auto x = up.pack(ul);
  if (!x) throw InfeasibleError("13", "uplink windows cannot be packed");
  const auto y = down.pack(dl);
  if (!y) throw InfeasibleError("13", "downlink windows cannot be packed");

  Solution s;
  s.scheme = scheme;
  s.ul_alloc = IntMatrix(n, phi);
  s.dl_alloc = IntMatrix(n, phi);
  s.ul_sched = IntMatrix(n, phi);
  s.dl_sched = IntMatrix(n, phi);
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= phi; ++j) {
      s.ul_alloc(i, j - 1) = (*x)[i][j];
      s.dl_alloc(i, j - 1) = (*y)[i][j];
      s.ul_sched(i, j - 1) = (*x)[i][j] > 0 ? 1 : 0;
      s.dl_sched(i, j - 1) = (*y)[i][j] > 0 ? 1 : 0;
    }
  }

  int A = ul[0].first;
  int B = ul[0].last;
  for (const Window& w : ul) {
    A = std::min(A, w.first);
    B = std::max(B, w.last);
  }
  const double slot_ms = instance.frame.slot_duration_ms();
  for (int i = 0; i < n; ++i) {
    s.first_ul.push_back(ul[i].first);
    s.last_ul.push_back(ul[i].last);
    s.first_dl.push_back(dl[i].first);
    s.last_dl.push_back(dl[i].last);
    const int e2e = dl[i].last - A;
    const int alloc = dl[i].first - B;
    const auto idx = alloc >= 1 ? instance.table.find(e2e, alloc) : std::nullopt;
    if (!idx) throw InfeasibleError("edge-gating", "robot " + std::to_string(i) + " has no QoC entry");
    s.e2e_slots.push_back(e2e);
    s.alloc_slots.push_back(alloc);
    s.e2e_delay_ms.push_back(e2e * slot_ms);
    s.alloc_delay_ms.push_back(alloc * slot_ms);
    s.delay_choice.push_back(static_cast<int>(*idx));
    s.qoc.push_back(instance.table.entries[*idx].qoc);
    s.total_qoc += s.qoc.back();
    s.total_e2e_slots += e2e;
  }
  s.objective_value = scheme == Scheme::max_qoc ? s.total_qoc : s.total_e2e_slots * slot_ms;
  return s;
}

namespace {

void add(std::vector<Violation>& out, std::string c, std::string detail) {
  out.push_back({std::move(c), std::move(detail)});
}

std::string robot_slot(int i, int j) {
  return "robot " + std::to_string(i) + ", slot " + std::to_string(j);
}

}  // namespace

std::vector<Violation> validate(const Solution& s, const Instance& instance) {
  std::vector<Violation> out;
  const int n = instance.n_robots;
  const int phi = instance.phi();
  const std::size_t un = static_cast<std::size_t>(n);
  const auto matrix_ok = [&](const IntMatrix& m) {
    return m.rows() == un && m.cols() == static_cast<std::size_t>(phi);
  };
  if (!matrix_ok(s.ul_alloc) || !matrix_ok(s.dl_alloc) || !matrix_ok(s.ul_sched) ||
      !matrix_ok(s.dl_sched) || s.first_ul.size() != un || s.last_ul.size() != un ||
      s.first_dl.size() != un || s.last_dl.size() != un || s.e2e_slots.size() != un ||
      s.alloc_slots.size() != un || s.e2e_delay_ms.size() != un || s.alloc_delay_ms.size() != un ||
      s.delay_choice.size() != un || s.qoc.size() != un) {
    add(out, "shape", "solution dimensions do not match the instance");
    return out;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= phi; ++j) {
      const int x = s.ul_alloc(i, j - 1);
      const int y = s.dl_alloc(i, j - 1);
      if (x < 0 || y < 0) add(out, "direction", "negative allocation at " + robot_slot(i, j));
      if (x > 0 && instance.frame.kind(j) != SlotKind::uplink) {
        add(out, "direction", "uplink PRBs on a downlink slot at " + robot_slot(i, j));
      }
      if (y > 0 && instance.frame.kind(j) != SlotKind::downlink) {
        add(out, "direction", "downlink PRBs on an uplink slot at " + robot_slot(i, j));
      }
    }
  }

  for (int j = 1; j <= phi; ++j) {
    int sx = 0;
    int sy = 0;
    for (int i = 0; i < n; ++i) {
      sx += s.ul_alloc(i, j - 1);
      sy += s.dl_alloc(i, j - 1);
    }
    if (sx > instance.frame.capacity) {
      add(out, "13", "uplink load " + std::to_string(sx) + " exceeds capacity in slot " + std::to_string(j));
    }
    if (sy > instance.frame.capacity) {
      add(out, "13", "downlink load " + std::to_string(sy) + " exceeds capacity in slot " + std::to_string(j));
    }
  }

  for (int i = 0; i < n; ++i) {
    int sx = 0;
    int sy = 0;
    for (int j = 0; j < phi; ++j) {
      sx += s.ul_alloc(i, j);
      sy += s.dl_alloc(i, j);
    }
    if (sx != instance.ul_need) add(out, "14", "robot " + std::to_string(i) + " uplink total " + std::to_string(sx));
    if (sy != instance.dl_need) add(out, "14", "robot " + std::to_string(i) + " downlink total " + std::to_string(sy));
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= phi; ++j) {
      const int zu = s.ul_sched(i, j - 1);
      const int zd = s.dl_sched(i, j - 1);
      if (zu != (s.ul_alloc(i, j - 1) > 0 ? 1 : 0)) add(out, "15-16", "uplink indicator at " + robot_slot(i, j));
      if (zd != (s.dl_alloc(i, j - 1) > 0 ? 1 : 0)) add(out, "15-16", "downlink indicator at " + robot_slot(i, j));
    }
  }

  for (int i = 0; i < n; ++i) {
    int fu = 0, lu = 0, fd = 0, ld = 0;
    for (int j = 1; j <= phi; ++j) {
      if (s.ul_sched(i, j - 1) == 1) {
        if (fu == 0) fu = j;
        lu = j;
      }
      if (s.dl_sched(i, j - 1) == 1) {
        if (fd == 0) fd = j;
        ld = j;
      }
    }
    const std::string r = "robot " + std::to_string(i);
    if (s.first_ul[i] != fu) add(out, "17-18", r + " first_ul " + std::to_string(s.first_ul[i]) + " != " + std::to_string(fu));
    if (s.last_ul[i] != lu) add(out, "17-18", r + " last_ul " + std::to_string(s.last_ul[i]) + " != " + std::to_string(lu));
    if (s.first_dl[i] != fd) add(out, "17-18", r + " first_dl " + std::to_string(s.first_dl[i]) + " != " + std::to_string(fd));
    if (s.last_dl[i] != ld) add(out, "17-18", r + " last_dl " + std::to_string(s.last_dl[i]) + " != " + std::to_string(ld));
  }

  const int A = *std::min_element(s.first_ul.begin(), s.first_ul.end());
  const int B = *std::max_element(s.last_ul.begin(), s.last_ul.end());
  const double slot_ms = instance.frame.slot_duration_ms();
  for (int i = 0; i < n; ++i) {
    const std::string r = "robot " + std::to_string(i);
    if (s.first_dl[i] <= B) add(out, "edge-gating", r + " downlink starts before the last uplink slot");
    const int e2e = s.last_dl[i] - A;
    const int alloc = s.first_dl[i] - B;
    if (s.e2e_slots[i] != e2e || std::abs(s.e2e_delay_ms[i] - e2e * slot_ms) > 1e-9) {
      add(out, "20-21", r + " e2e delay mismatch");
    }
    if (s.alloc_slots[i] != alloc || std::abs(s.alloc_delay_ms[i] - alloc * slot_ms) > 1e-9) {
      add(out, "20-21", r + " allocation delay mismatch");
    }
    const int c = s.delay_choice[i];
    if (c < 0 || c >= static_cast<int>(instance.table.entries.size())) {
      add(out, "19", r + " delay choice out of range");
      continue;
    }
    const auto& entry = instance.table.entries[c];
    const auto expected = instance.table.find(e2e, alloc);
    if (!expected || *expected != static_cast<std::size_t>(c)) {
      add(out, "19", r + " delay choice does not match its realized delays");
    }
    if (s.qoc[i] != entry.qoc) add(out, "22", r + " QoC differs from the selected table entry");
  }

  double total_qoc = 0.0;
  int total_e2e = 0;
  for (int i = 0; i < n; ++i) {
    total_qoc += s.qoc[i];
    total_e2e += s.e2e_slots[i];
  }
  const double expected = s.scheme == Scheme::max_qoc ? total_qoc : total_e2e * slot_ms;
  if (std::abs(s.objective_value - expected) > 1e-9 * std::max(1.0, std::abs(expected)) ||
      s.total_e2e_slots != total_e2e || std::abs(s.total_qoc - total_qoc) > 1e-9) {
    add(out, "objective", "objective value does not match the per-robot values");
  }
  if (s.scheme == Scheme::min_delay_stable) {
    for (int i = 0; i < n; ++i) {
      if (!(s.qoc[i] > 0.0)) add(out, "objective", "robot " + std::to_string(i) + " has zero QoC under scheme 4");
    }
  }
  return out;
}

}  // namespace qoc::alloc
