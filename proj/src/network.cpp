// SPDX-License-Identifier: Apache-2.0

#include "qoc/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qoc/common.hpp"

#ifndef QOC_DATA_DIR
#define QOC_DATA_DIR "data"
#endif

namespace qoc::network {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void DelayModel::validate() const {
  require(std::isfinite(mean_ms), "delay model: mean must be finite");
  require(std_ms > 0.0 && std::isfinite(std_ms), "delay model: std > 0");
  require(lower_ms == 0.0, "delay model: lower bound must be 0");
  require(upper_ms > lower_ms, "delay model: lower < upper");
  require(p_ul > 0.0 && p_ul <= 1.0, "delay model: p_ul in (0, 1]");
  require(p_dl > 0.0 && p_dl <= 1.0, "delay model: p_dl in (0, 1]");
}

double backend_cdf(const DelayModel& model, double d_ms) {
  model.validate();
  if (d_ms <= model.lower_ms) return 0.0;
  if (d_ms >= model.upper_ms) return 1.0;
  const double lo = std_normal_cdf((model.lower_ms - model.mean_ms) / model.std_ms);
  const double hi = std_normal_cdf((model.upper_ms - model.mean_ms) / model.std_ms);
  const double mass = hi - lo;
  if (!(mass > 0.0)) {
    // All Gaussian mass sits beyond one bound; the truncation collapses onto it.
    return model.mean_ms < model.lower_ms ? 1.0 : 0.0;
  }
  const double at = std_normal_cdf((d_ms - model.mean_ms) / model.std_ms);
  return std::clamp((at - lo) / mass, 0.0, 1.0);
}

double loop_reliability(const DelayModel& model, double d_alloc_ms) {
  return backend_cdf(model, d_alloc_ms) * model.p_ul * model.p_dl;
}

double sample_backend_delay(const DelayModel& model, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(model.mean_ms, model.std_ms);
  return std::clamp(gauss(rng), model.lower_ms, model.upper_ms);
}

double clipped_cdf(const DelayModel& model, double d_ms) {
  model.validate();
  if (d_ms < model.lower_ms) return 0.0;
  if (d_ms >= model.upper_ms) return 1.0;
  return std_normal_cdf((d_ms - model.mean_ms) / model.std_ms);
}

char slot_letter(SlotKind kind) { return kind == SlotKind::uplink ? 'U' : 'D'; }

TddFrame TddFrame::from_pattern(std::string_view pattern, int repetitions, int numerology,
                                int capacity) {
  TddFrame frame;
  for (char c : pattern) {
    if (c == 'U' || c == 'u') {
      frame.pattern.push_back(SlotKind::uplink);
    } else if (c == 'D' || c == 'd') {
      frame.pattern.push_back(SlotKind::downlink);
    } else {
      throw ConfigError(std::string("tdd frame: invalid slot letter '") + c + "'");
    }
  }
  frame.repetitions = repetitions;
  frame.numerology = numerology;
  frame.capacity = capacity;
  return frame;
}

double TddFrame::slot_duration_ms() const { return 1.0 / static_cast<double>(1 << numerology); }

std::string TddFrame::pattern_string() const {
  std::string s;
  for (auto k : pattern) s.push_back(slot_letter(k));
  return s;
}

SlotKind TddFrame::kind(int slot) const {
  return pattern[static_cast<std::size_t>(slot - 1) % pattern.size()];
}

void TddFrame::validate() const {
  require(!pattern.empty(), "tdd frame: empty pattern");
  require(repetitions >= 1, "tdd frame: repetitions >= 1");
  require(numerology >= 0 && numerology <= 6, "tdd frame: numerology in [0, 6]");
  require(capacity >= 1, "tdd frame: capacity >= 1");
  require(std::find(pattern.begin(), pattern.end(), SlotKind::uplink) != pattern.end(),
          "tdd frame: pattern needs at least one uplink slot");
  require(std::find(pattern.begin(), pattern.end(), SlotKind::downlink) != pattern.end(),
          "tdd frame: pattern needs at least one downlink slot");
}

std::vector<ExpandedSlot> expand_tdd(const TddFrame& frame) {
  require(!frame.pattern.empty(), "tdd frame: empty pattern");
  require(frame.repetitions >= 1, "tdd frame: repetitions >= 1");
  const double slot = frame.slot_duration_ms();
  std::vector<ExpandedSlot> slots;
  slots.reserve(static_cast<std::size_t>(frame.slot_count()));
  for (int j = 1; j <= frame.slot_count(); ++j) {
    slots.push_back({j, frame.kind(j), (j - 1) * slot});
  }
  return slots;
}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const McsEntry& a, const McsEntry& b) { return a.index < b.index; });
}

McsTable McsTable::parse(std::string_view text) {
  std::vector<McsEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    McsEntry e;
    if (!(fields >> e.index)) continue;
    if (!(fields >> e.modulation_order >> e.code_rate_x1024)) {
      throw ConfigError("mcs table: malformed record on line " + std::to_string(line_no));
    }
    if (e.modulation_order <= 0 || e.code_rate_x1024 <= 0.0 || e.code_rate_x1024 >= 1024.0) {
      throw ConfigError("mcs table: out-of-range record on line " + std::to_string(line_no));
    }
    entries.push_back(e);
  }
  if (entries.empty()) throw ConfigError("mcs table: no records");
  return McsTable(std::move(entries));
}

McsTable McsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("mcs table: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const McsEntry& McsTable::at(int index) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [index](const McsEntry& e) { return e.index == index; });
  if (it == entries_.end()) throw ConfigError("mcs table: no entry for index " + std::to_string(index));
  return *it;
}

std::string default_mcs_table_path() { return std::string(QOC_DATA_DIR) + "/mcs_table_64qam.txt"; }

void LinkBudget::apply_mcs(const McsTable& table) {
  const auto& e = table.at(mcs_index);
  modulation_order = e.modulation_order;
  code_rate = e.code_rate();
}

void LinkBudget::validate() const {
  require(packet_bits > 0.0, "link budget: packet_bits > 0");
  require(periodicity_ms > 0.0, "link budget: periodicity > 0");
  require(modulation_order >= 1, "link budget: modulation order >= 1");
  require(code_rate > 0.0 && code_rate < 1.0, "link budget: 0 < code_rate < 1");
  require(overhead >= 0.0 && overhead < 1.0, "link budget: 0 <= overhead < 1");
  require(n_layers >= 1, "link budget: n_layers >= 1");
  require(scaling > 0.0, "link budget: scaling > 0");
  require(n_carriers >= 1, "link budget: n_carriers >= 1");
  require(max_prbs >= 1, "link budget: max_prbs >= 1");
}

double bits_per_prb_slot(const LinkBudget& b) {
  constexpr double subcarriers_per_prb = 12.0;
  constexpr double symbols_per_slot = 14.0;
  return subcarriers_per_prb * symbols_per_slot * b.modulation_order * b.code_rate * b.n_layers *
         b.scaling * (1.0 - b.overhead) * b.n_carriers;
}

PrbRequirement prb_requirement(const LinkBudget& budget, const TddFrame& frame) {
  budget.validate();
  PrbRequirement r;
  r.bits_per_prb_slot = bits_per_prb_slot(budget);
  // Relative slack keeps an exact fill (bits == k * capacity) from rounding up.
  r.prbs = static_cast<int>(std::ceil(budget.packet_bits / r.bits_per_prb_slot * (1.0 - 1e-12)));
  r.prbs = std::max(r.prbs, 1);
  if (r.prbs > budget.max_prbs) {
    throw ConfigError("link budget: requirement of " + std::to_string(r.prbs) +
                      " PRBs exceeds max_prbs " + std::to_string(budget.max_prbs));
  }
  if (r.prbs > frame.capacity) {
    throw ConfigError("link budget: requirement of " + std::to_string(r.prbs) +
                      " PRBs exceeds the per-slot capacity " + std::to_string(frame.capacity));
  }
  return r;
}

}  // namespace qoc::network
