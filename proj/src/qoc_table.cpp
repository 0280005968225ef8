// SPDX-License-Identifier: Apache-2.0

#include "qoc/qoc_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "qoc/common.hpp"

namespace qoc::table {

using consensus::LoopCondition;
using consensus::SimConfig;

namespace {

void require_increasing(const std::vector<double>& axis, const std::string& what) {
  if (axis.empty()) throw ConfigError(what + ": axis must not be empty");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) throw ConfigError(what + ": axis must be strictly increasing");
  }
}

void require_delays(const SimConfig& config, const std::vector<double>& delays, const std::string& what) {
  require_increasing(delays, what);
  if (delays.front() < 0.0 || delays.back() > config.period_ms * (1.0 + 1e-12)) {
    throw ConfigError(what + ": delays must lie in [0, period]");
  }
}

SweepResult run_sweep(SweepKind kind, const SimConfig& config, const std::vector<double>& axis,
                      int n_runs, const std::function<LoopCondition(double)>& condition_at) {
  SweepResult r;
  r.kind = kind;
  r.axis = axis;
  r.n_runs = n_runs;
  r.seed = config.seed;
  for (double v : axis) {
    const auto mc = consensus::monte_carlo_auc(config, condition_at(v), n_runs);
    r.auc.push_back(mc.mean);
    r.std_error.push_back(mc.std_error);
  }
  return r;
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::deterministic_delay: return "deterministic";
    case SweepKind::reliability_only: return "reliability";
    case SweepKind::stochastic: return "stochastic";
  }
  return "unknown";
}

SweepResult sweep_deterministic(const SimConfig& config, const std::vector<double>& delays_ms,
                                int n_runs) {
  require_delays(config, delays_ms, "deterministic sweep");
  return run_sweep(SweepKind::deterministic_delay, config, delays_ms, n_runs, [](double d) {
    return LoopCondition{d, 1.0, std::nullopt};
  });
}

SweepResult sweep_reliability(const SimConfig& config, const std::vector<double>& reliabilities,
                              int n_runs) {
  require_increasing(reliabilities, "reliability sweep");
  if (!(reliabilities.front() > 0.0) || reliabilities.back() > 1.0) {
    throw ConfigError("reliability sweep: reliabilities must lie in (0, 1]");
  }
  return run_sweep(SweepKind::reliability_only, config, reliabilities, n_runs, [](double p) {
    return LoopCondition{0.0, p, std::nullopt};
  });
}

SweepResult sweep_stochastic(const SimConfig& config, const network::DelayModel& model,
                             const std::vector<double>& delays_ms, int n_runs, StochasticMode mode) {
  require_delays(config, delays_ms, "stochastic sweep");
  model.validate();
  return run_sweep(SweepKind::stochastic, config, delays_ms, n_runs, [&](double d) {
    LoopCondition c{d, network::loop_reliability(model, d), std::nullopt};
    if (mode == StochasticMode::per_iteration) c.sampled = consensus::SampledBackend{model, d};
    return c;
  });
}

std::string_view to_string(TableMode mode) {
  return mode == TableMode::pair ? "pair" : "single-index";
}

TableMode table_mode_from_string(std::string_view text) {
  if (text == "pair") return TableMode::pair;
  if (text == "single-index") return TableMode::single_index;
  throw ConfigError("unknown table mode '" + std::string(text) + "'");
}

std::optional<std::size_t> QocTable::find(int e2e_slots, int alloc_slots) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.e2e_slots != e2e_slots) continue;
    if (mode == TableMode::single_index || e.alloc_slots == alloc_slots) return i;
  }
  return std::nullopt;
}

std::vector<double> QocTable::e2e_delays_ms() const {
  std::set<int> s;
  for (const auto& e : entries) s.insert(e.e2e_slots);
  std::vector<double> out;
  for (int v : s) out.push_back(v * slot_ms);
  return out;
}

std::vector<double> QocTable::alloc_delays_ms() const {
  std::set<int> s;
  for (const auto& e : entries) s.insert(e.alloc_slots);
  std::vector<double> out;
  for (int v : s) out.push_back(v * slot_ms);
  return out;
}

double normalizer(const std::vector<QocEntry>& entries) {
  double max_stable = 0.0;
  bool any_unstable = false;
  for (const auto& e : entries) {
    if (e.auc >= 1.0) {
      any_unstable = true;
    } else {
      max_stable = std::max(max_stable, e.auc);
    }
  }
  return any_unstable ? std::max(max_stable, 1.0) : max_stable;
}

void QocTable::normalize() {
  max_auc = normalizer(entries);
  for (auto& e : entries) {
    if (e.auc >= 1.0 || !(max_auc > 0.0)) {
      e.qoc = 0.0;
    } else {
      e.qoc = (max_auc - e.auc) / max_auc;
    }
  }
}

std::vector<std::pair<int, int>> realizable_pairs(const network::TddFrame& frame) {
  const int phi = frame.slot_count();
  std::vector<int> ul, dl;
  for (int j = 1; j <= phi; ++j) (frame.kind(j) == network::SlotKind::uplink ? ul : dl).push_back(j);
  std::set<std::pair<int, int>> pairs;
  for (int f : ul) {
    for (int l : ul) {
      if (l < f) continue;
      for (int first_dl : dl) {
        if (first_dl <= l) continue;
        for (int last_dl : dl) {
          if (last_dl < first_dl) continue;
          pairs.emplace(last_dl - f, first_dl - l);
        }
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

namespace {

std::string describe(const network::TddFrame& frame) {
  std::ostringstream s;
  s << frame.pattern_string() << " x" << frame.repetitions << " mu=" << frame.numerology
    << " R=" << frame.capacity;
  return s.str();
}

std::vector<std::pair<int, int>> table_keys(const network::TddFrame& frame, TableMode mode) {
  auto pairs = realizable_pairs(frame);
  if (mode == TableMode::pair) return pairs;
  std::set<int> e2e;
  for (auto [e, a] : pairs) e2e.insert(e);
  std::vector<std::pair<int, int>> keys;
  for (int e : e2e) keys.emplace_back(e, e - 1);
  return keys;
}

}  // namespace

QocTable build_qoc_table(const SimConfig& config, const network::DelayModel& model,
                         const network::TddFrame& frame, int n_runs, TableMode mode) {
  frame.validate();
  model.validate();
  config.validate();
  if (n_runs < 1) throw ConfigError("qoc table: n_runs >= 1");
  const auto keys = table_keys(frame, mode);
  if (keys.empty()) throw SimulationError("qoc table: the frame admits no (e2e, alloc) pair");

  QocTable t;
  t.mode = mode;
  t.slot_ms = frame.slot_duration_ms();
  t.frame_description = describe(frame);
  t.model = model;
  t.seed = config.seed;
  t.n_runs = n_runs;
  for (auto [e2e, alloc] : keys) {
    const double e2e_ms = e2e * t.slot_ms;
    if (e2e_ms > config.period_ms * (1.0 + 1e-12)) {
      throw SimulationError("qoc table: e2e delay " + format_decimal(e2e_ms) +
                            " ms exceeds the control period");
    }
    const LoopCondition c{e2e_ms, network::loop_reliability(model, alloc * t.slot_ms), std::nullopt};
    const auto mc = consensus::monte_carlo_auc(config, c, n_runs);
    t.entries.push_back({e2e, alloc, mc.mean, mc.std_error, 0.0});
  }
  t.normalize();
  return t;
}

QocTable table_from_auc(const network::TddFrame& frame, std::vector<QocEntry> entries, TableMode mode) {
  QocTable t;
  t.mode = mode;
  t.slot_ms = frame.slot_duration_ms();
  t.frame_description = describe(frame);
  std::sort(entries.begin(), entries.end(), [](const QocEntry& a, const QocEntry& b) {
    return std::pair(a.e2e_slots, a.alloc_slots) < std::pair(b.e2e_slots, b.alloc_slots);
  });
  t.entries = std::move(entries);
  t.normalize();
  return t;
}

std::string serialize(const QocTable& t) {
  std::ostringstream out;
  const auto& m = t.model;
  out << "# qoc-table v1\n";
  out << "# mode: " << to_string(t.mode) << '\n';
  out << "# frame: " << t.frame_description << '\n';
  out << "# slot_ms: " << format_decimal(t.slot_ms) << '\n';
  out << "# delay_model: mean_ms=" << format_decimal(m.mean_ms) << " std_ms=" << format_decimal(m.std_ms)
      << " lower_ms=" << format_decimal(m.lower_ms) << " upper_ms=" << format_decimal(m.upper_ms)
      << " p_ul=" << format_decimal(m.p_ul) << " p_dl=" << format_decimal(m.p_dl) << '\n';
  out << "# seed: " << t.seed << '\n';
  out << "# n_runs: " << t.n_runs << '\n';
  out << "# max_auc: " << format_decimal(t.max_auc) << '\n';
  out << "e2e_ms,alloc_ms,auc,stderr,qoc\n";
  for (const auto& e : t.entries) {
    out << format_decimal(e.e2e_slots * t.slot_ms) << ',' << format_decimal(e.alloc_slots * t.slot_ms)
        << ',' << format_decimal(e.auc) << ',' << format_decimal(e.std_error) << ','
        << format_decimal(e.qoc) << '\n';
  }
  return out.str();
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("qoc table: bad number '" + s + "' in " + what);
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

QocTable parse_table(std::string_view text) {
  QocTable t;
  std::map<std::string, std::string> header;
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        header[trim(line.substr(1, colon - 1))] = trim(line.substr(colon + 1));
      }
      continue;
    }
    if (!saw_columns) {
      if (line != "e2e_ms,alloc_ms,auc,stderr,qoc") throw ConfigError("qoc table: unexpected column header");
      saw_columns = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 5) throw ConfigError("qoc table: row needs 5 columns: " + line);
    QocEntry e;
    const double e2e_ms = parse_number(cells[0], "e2e_ms");
    const double alloc_ms = parse_number(cells[1], "alloc_ms");
    e.auc = parse_number(cells[2], "auc");
    e.std_error = parse_number(cells[3], "stderr");
    e.qoc = parse_number(cells[4], "qoc");
    if (!header.count("slot_ms")) throw ConfigError("qoc table: missing slot_ms header");
    t.slot_ms = parse_number(header["slot_ms"], "slot_ms");
    e.e2e_slots = static_cast<int>(std::llround(e2e_ms / t.slot_ms));
    e.alloc_slots = static_cast<int>(std::llround(alloc_ms / t.slot_ms));
    t.entries.push_back(e);
  }
  if (!saw_columns) throw ConfigError("qoc table: missing column header");
  if (header.count("mode")) t.mode = table_mode_from_string(header["mode"]);
  if (header.count("slot_ms")) t.slot_ms = parse_number(header["slot_ms"], "slot_ms");
  if (header.count("frame")) t.frame_description = header["frame"];
  if (header.count("seed")) t.seed = std::stoull(header["seed"]);
  if (header.count("n_runs")) t.n_runs = std::stoi(header["n_runs"]);
  if (header.count("max_auc")) t.max_auc = parse_number(header["max_auc"], "max_auc");
  if (header.count("delay_model")) {
    std::istringstream fields(header["delay_model"]);
    std::string kv;
    while (fields >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq);
      const double v = parse_number(kv.substr(eq + 1), key);
      if (key == "mean_ms") t.model.mean_ms = v;
      else if (key == "std_ms") t.model.std_ms = v;
      else if (key == "lower_ms") t.model.lower_ms = v;
      else if (key == "upper_ms") t.model.upper_ms = v;
      else if (key == "p_ul") t.model.p_ul = v;
      else if (key == "p_dl") t.model.p_dl = v;
    }
  }
  return t;
}

}  // namespace qoc::table
