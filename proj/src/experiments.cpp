// SPDX-License-Identifier: Apache-2.0

#include "qoc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qoc::exp {

using nlohmann::json;
namespace fs = std::filesystem;

Profile profile_from_string(std::string_view text) {
  if (text == "desk") return Profile::desk;
  if (text == "paper") return Profile::paper;
  throw ConfigError("unknown profile '" + std::string(text) + "' (expected desk or paper)");
}

std::string_view to_string(Profile p) { return p == Profile::desk ? "desk" : "paper"; }

namespace {

std::vector<double> grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw ConfigError("sweep range: need step > 0 and stop >= start");
  const auto n = static_cast<long long>(std::llround((stop - start) / step));
  std::vector<double> v;
  for (long long k = 0; k <= n; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

std::vector<alloc::Scheme> every_scheme() { return {alloc::all_schemes.begin(), alloc::all_schemes.end()}; }

}  // namespace

ExperimentConfig default_config(Profile profile) {
  ExperimentConfig c;
  c.profile = profile;
  const int n = profile == Profile::desk ? 10 : 80;
  c.n_runs = profile == Profile::desk ? 200 : 1000;
  c.sim = consensus::SimConfig::with_defaults(n, 1);
  c.frame = network::TddFrame::from_pattern("UDUUD", 4, 1, 133);
  c.uplink.overhead = 0.08;
  c.downlink.overhead = 0.14;
  c.mcs_table_path = network::default_mcs_table_path();
  const auto mcs = network::McsTable::load(c.mcs_table_path);
  c.uplink.apply_mcs(mcs);
  c.downlink.apply_mcs(mcs);
  c.schemes = every_scheme();
  c.sweeps.delays_ms = grid(0.0, 10.0, 0.5);
  c.sweeps.reliabilities = grid(0.2, 1.0, 0.05);
  c.tdd_patterns = {"UDUUD", "UUDUD", "UUUDD"};
  return c;
}

void ExperimentConfig::validate() const {
  sim.validate();
  delay_model.validate();
  frame.validate();
  uplink.validate();
  downlink.validate();
  if (schemes.empty()) throw ConfigError("config: schemes must not be empty");
  if (n_runs < 1) throw ConfigError("config: n_runs >= 1");
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  for (const auto& p : tdd_patterns) {
    network::TddFrame::from_pattern(p, frame.repetitions, frame.numerology, frame.capacity).validate();
  }
}

namespace {

/// Reads known keys from a JSON object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return false;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::vector<double> read_axis(const json& j, const std::string& where) {
  if (j.is_array()) {
    try {
      return j.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError(where + ": expected numbers");
    }
  }
  Reader r(j, where);
  double start = 0, stop = 0, step = 0;
  if (!r.get("start", start) || !r.get("stop", stop) || !r.get("step", step)) {
    throw ConfigError(where + ": needs start, stop and step");
  }
  r.finish();
  return grid(start, stop, step);
}

void read_link(const json& j, network::LinkBudget& b, const std::string& where) {
  Reader r(j, where);
  r.get("packet_bits", b.packet_bits);
  r.get("periodicity_ms", b.periodicity_ms);
  r.get("mcs_index", b.mcs_index);
  r.get("overhead", b.overhead);
  r.get("n_layers", b.n_layers);
  r.get("scaling", b.scaling);
  r.get("n_carriers", b.n_carriers);
  r.get("max_prbs", b.max_prbs);
  r.child("uplink");
  r.child("downlink");
  r.child("mcs_table");
  r.finish();
}

}  // namespace

ExperimentConfig config_from_json(std::string_view json_text, std::optional<Profile> profile,
                                  const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  Reader top(doc, "config");
  std::string profile_name;
  if (top.get("profile", profile_name) && !profile) profile = profile_from_string(profile_name);
  ExperimentConfig c = default_config(profile.value_or(Profile::desk));

  std::uint64_t seed = c.sim.seed;
  top.get("seed", seed);
  top.get("n_runs", c.n_runs);
  top.get("output_dir", c.output_dir);

  if (const json* s = top.child("sim")) {
    Reader r(*s, "config.sim");
    int n = c.sim.n_robots;
    const bool n_set = r.get("n_robots", n);
    if (n_set) {
      if (n < 1) throw ConfigError("config.sim.n_robots: must be positive");
      const auto base = consensus::SimConfig::with_defaults(n, seed);
      c.sim.n_robots = n;
      c.sim.gain = base.gain;
      c.sim.initial_positions = base.initial_positions;
    }
    r.get("gain_per_s", c.sim.gain);
    r.get("period_ms", c.sim.period_ms);
    r.get("horizon_ms", c.sim.horizon_ms);
    r.get("step_ms", c.sim.step_ms);
    if (const json* p = r.child("initial_positions")) {
      if (p->is_string()) {
        const auto mode = p->get<std::string>();
        if (mode == "grid") {
          c.sim.initial_positions = consensus::grid_positions(c.sim.n_robots);
        } else if (mode == "random") {
          c.sim.initial_positions = consensus::random_positions(c.sim.n_robots, seed);
        } else {
          throw ConfigError("config.sim.initial_positions: expected grid, random or a list");
        }
      } else {
        try {
          c.sim.initial_positions = p->get<std::vector<double>>();
        } catch (const json::exception&) {
          throw ConfigError("config.sim.initial_positions: expected grid, random or a list");
        }
      }
    }
    r.finish();
  }
  c.sim.seed = seed;

  if (const json* d = top.child("delay_model")) {
    Reader r(*d, "config.delay_model");
    r.get("mean_ms", c.delay_model.mean_ms);
    r.get("std_ms", c.delay_model.std_ms);
    r.get("lower_ms", c.delay_model.lower_ms);
    r.get("upper_ms", c.delay_model.upper_ms);
    r.get("p_ul", c.delay_model.p_ul);
    r.get("p_dl", c.delay_model.p_dl);
    r.finish();
  }

  if (const json* f = top.child("frame")) {
    Reader r(*f, "config.frame");
    std::string pattern = c.frame.pattern_string();
    int reps = c.frame.repetitions, mu = c.frame.numerology, cap = c.frame.capacity;
    r.get("pattern", pattern);
    r.get("repetitions", reps);
    r.get("numerology", mu);
    r.get("capacity", cap);
    r.finish();
    c.frame = network::TddFrame::from_pattern(pattern, reps, mu, cap);
  }

  if (const json* l = top.child("link")) {
    read_link(*l, c.uplink, "config.link");
    read_link(*l, c.downlink, "config.link");
    if (l->contains("mcs_table")) {
      fs::path p = l->at("mcs_table").get<std::string>();
      if (p.is_relative()) p = fs::path(base_dir) / p;
      c.mcs_table_path = p.string();
    }
    if (l->contains("uplink")) read_link(l->at("uplink"), c.uplink, "config.link.uplink");
    if (l->contains("downlink")) read_link(l->at("downlink"), c.downlink, "config.link.downlink");
  }
  const auto mcs = network::McsTable::load(c.mcs_table_path);
  c.uplink.apply_mcs(mcs);
  c.downlink.apply_mcs(mcs);

  if (const json* s = top.child("schemes")) {
    if (!s->is_array()) throw ConfigError("config.schemes: expected a list");
    c.schemes.clear();
    for (const auto& name : *s) {
      if (!name.is_string()) throw ConfigError("config.schemes: expected scheme names");
      c.schemes.push_back(alloc::scheme_from_string(name.get<std::string>()));
    }
  }

  std::string mode;
  if (top.get("table_mode", mode)) c.table_mode = table::table_mode_from_string(mode);

  if (const json* s = top.child("sweeps")) {
    Reader r(*s, "config.sweeps");
    if (const json* d = r.child("delays_ms")) c.sweeps.delays_ms = read_axis(*d, "config.sweeps.delays_ms");
    if (const json* p = r.child("reliabilities")) {
      c.sweeps.reliabilities = read_axis(*p, "config.sweeps.reliabilities");
    }
    std::string sm;
    if (r.get("stochastic_mode", sm)) {
      if (sm == "fixed-pair") {
        c.sweeps.stochastic_mode = table::StochasticMode::fixed_pair;
      } else if (sm == "per-iteration") {
        c.sweeps.stochastic_mode = table::StochasticMode::per_iteration;
      } else {
        throw ConfigError("config.sweeps.stochastic_mode: expected fixed-pair or per-iteration");
      }
    }
    r.finish();
  }

  top.get("tdd_patterns", c.tdd_patterns);
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<Profile> profile) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str(), profile, fs::path(path).parent_path().string());
}

namespace {

/// Rounds to the 12 significant digits used by every artifact.
double num(double x) { return std::stod(format_decimal(x)); }

json link_json(const network::LinkBudget& b) {
  return {{"packet_bits", num(b.packet_bits)}, {"periodicity_ms", num(b.periodicity_ms)},
          {"mcs_index", b.mcs_index}, {"modulation_order", b.modulation_order},
          {"code_rate", num(b.code_rate)}, {"overhead", num(b.overhead)}, {"n_layers", b.n_layers},
          {"scaling", num(b.scaling)}, {"n_carriers", b.n_carriers}, {"max_prbs", b.max_prbs}};
}

json config_json(const ExperimentConfig& c) {
  json positions = json::array();
  for (double p : c.sim.initial_positions) positions.push_back(num(p));
  json schemes = json::array();
  for (auto s : c.schemes) schemes.push_back(std::string(alloc::scheme_name(s)));
  json delays = json::array();
  for (double d : c.sweeps.delays_ms) delays.push_back(num(d));
  json rel = json::array();
  for (double p : c.sweeps.reliabilities) rel.push_back(num(p));
  return {
      {"profile", std::string(to_string(c.profile))},
      {"seed", c.sim.seed},
      {"n_runs", c.n_runs},
      {"sim",
       {{"n_robots", c.sim.n_robots}, {"gain_per_s", num(c.sim.gain)}, {"period_ms", num(c.sim.period_ms)},
        {"horizon_ms", num(c.sim.horizon_ms)}, {"step_ms", num(c.sim.step_ms)},
        {"initial_positions", positions}}},
      {"delay_model",
       {{"mean_ms", num(c.delay_model.mean_ms)}, {"std_ms", num(c.delay_model.std_ms)},
        {"lower_ms", num(c.delay_model.lower_ms)}, {"upper_ms", num(c.delay_model.upper_ms)},
        {"p_ul", num(c.delay_model.p_ul)}, {"p_dl", num(c.delay_model.p_dl)}}},
      {"frame",
       {{"pattern", c.frame.pattern_string()}, {"repetitions", c.frame.repetitions},
        {"numerology", c.frame.numerology}, {"capacity", c.frame.capacity}}},
      {"link", {{"uplink", link_json(c.uplink)}, {"downlink", link_json(c.downlink)}}},
      {"schemes", schemes},
      {"table_mode", std::string(table::to_string(c.table_mode))},
      {"sweeps",
       {{"delays_ms", delays}, {"reliabilities", rel},
        {"stochastic_mode",
         c.sweeps.stochastic_mode == table::StochasticMode::fixed_pair ? "fixed-pair" : "per-iteration"}}},
      {"tdd_patterns", c.tdd_patterns},
  };
}

}  // namespace

std::string canonical_json(const ExperimentConfig& config) { return config_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  Csv& cell(double v) { return raw(format_decimal(v)); }
  Csv& cell(int v) { return raw(std::to_string(v)); }
  Csv& cell(std::uint64_t v) { return raw(std::to_string(v)); }
  Csv& cell(std::string_view v) { return raw(std::string(v)); }
  void end() {
    out_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  Csv& raw(const std::string& s) {
    out_ << (fresh_ ? "" : ",") << s;
    fresh_ = false;
    return *this;
  }

  std::ostringstream out_;
  bool fresh_ = true;
};

std::string sweep_csv(const table::SweepResult& r) {
  Csv csv{"axis_value", "auc_mean", "auc_stderr", "n_runs", "seed"};
  for (std::size_t k = 0; k < r.axis.size(); ++k) {
    csv.cell(r.axis[k]).cell(r.auc[k]).cell(r.std_error[k]).cell(r.n_runs).cell(r.seed);
    csv.end();
  }
  return csv.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct SchemeSummary {
  alloc::Scheme scheme;
  alloc::Solution solution;
  double mean_qoc = 0.0;
  double mean_e2e_ms = 0.0;
  double mean_alloc_ms = 0.0;
  double mean_auc = 0.0;
};

SchemeSummary summarize(const alloc::Solution& s, const table::QocTable& t) {
  SchemeSummary out{s.scheme, s};
  const double n = s.n_robots();
  for (int i = 0; i < s.n_robots(); ++i) {
    out.mean_qoc += s.qoc[i];
    out.mean_e2e_ms += s.e2e_delay_ms[i];
    out.mean_alloc_ms += s.alloc_delay_ms[i];
    out.mean_auc += t.entries[s.delay_choice[i]].auc;
  }
  out.mean_qoc /= n;
  out.mean_e2e_ms /= n;
  out.mean_alloc_ms /= n;
  out.mean_auc /= n;
  return out;
}

std::vector<SchemeSummary> solve_schemes(const ExperimentConfig& config, const alloc::Instance& inst,
                                         const table::QocTable& t, const std::string& context,
                                         std::vector<std::string>& notes) {
  std::vector<SchemeSummary> out;
  for (auto scheme : config.schemes) {
    const auto t0 = std::chrono::steady_clock::now();
    alloc::Solution s;
    try {
      s = alloc::solve(inst, scheme);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(e.binding(), context + "scheme " + std::string(alloc::scheme_name(scheme)) +
                                             " infeasible: " + e.what());
    }
    notes.push_back(context + std::string(alloc::scheme_name(scheme)) + ": solved in " +
                    format_decimal(elapsed_ms(t0)) + " ms, " + std::to_string(s.nodes) + " nodes" +
                    (s.proven_optimal ? "" : " (node limit reached, not proven optimal)"));
    out.push_back(summarize(s, t));
  }
  return out;
}

table::QocTable table_for(const ExperimentConfig& config, const network::TddFrame& frame) {
  return table::build_qoc_table(config.sim, config.delay_model, frame, config.n_runs, config.table_mode);
}

}  // namespace

PrbPair prb_pair(const ExperimentConfig& config) {
  return {network::prb_requirement(config.uplink, config.frame),
          network::prb_requirement(config.downlink, config.frame)};
}

alloc::Instance make_instance(const ExperimentConfig& config, const network::TddFrame& frame,
                              const table::QocTable& t) {
  alloc::Instance inst;
  inst.frame = frame;
  inst.n_robots = config.sim.n_robots;
  inst.ul_need = network::prb_requirement(config.uplink, frame).prbs;
  inst.dl_need = network::prb_requirement(config.downlink, frame).prbs;
  inst.table = t;
  return inst;
}

std::string solution_json(const alloc::Solution& s, const alloc::Instance& inst) {
  json robots = json::array();
  for (int i = 0; i < s.n_robots(); ++i) {
    std::vector<int> ul, dl;
    for (int j = 0; j < inst.phi(); ++j) {
      ul.push_back(s.ul_alloc(i, j));
      dl.push_back(s.dl_alloc(i, j));
    }
    robots.push_back({{"robot", i},
                      {"first_ul", s.first_ul[i]},
                      {"last_ul", s.last_ul[i]},
                      {"first_dl", s.first_dl[i]},
                      {"last_dl", s.last_dl[i]},
                      {"e2e_slots", s.e2e_slots[i]},
                      {"e2e_delay_ms", num(s.e2e_delay_ms[i])},
                      {"alloc_slots", s.alloc_slots[i]},
                      {"alloc_delay_ms", num(s.alloc_delay_ms[i])},
                      {"delay_choice", s.delay_choice[i]},
                      {"qoc", num(s.qoc[i])},
                      {"ul_prbs", ul},
                      {"dl_prbs", dl}});
  }
  json doc = {{"scheme", std::string(alloc::scheme_name(s.scheme))},
              {"label", std::string(alloc::scheme_label(s.scheme))},
              {"objective_value", num(s.objective_value)},
              {"total_qoc", num(s.total_qoc)},
              {"total_e2e_slots", s.total_e2e_slots},
              {"proven_optimal", s.proven_optimal},
              {"solve_nodes", s.nodes},
              {"instance",
               {{"pattern", inst.frame.pattern_string()},
                {"repetitions", inst.frame.repetitions},
                {"phi", inst.phi()},
                {"slot_ms", num(inst.frame.slot_duration_ms())},
                {"capacity", inst.frame.capacity},
                {"n_robots", inst.n_robots},
                {"ul_need", inst.ul_need},
                {"dl_need", inst.dl_need},
                {"big_m", inst.effective_big_m()}}},
              {"robots", robots}};
  return doc.dump(2) + "\n";
}

Report run_tradeoff(const ExperimentConfig& config) {
  config.validate();
  Report r{"tradeoff", {}, {}};
  const auto det = table::sweep_deterministic(config.sim, config.sweeps.delays_ms, config.n_runs);
  const auto rel = table::sweep_reliability(config.sim, config.sweeps.reliabilities, config.n_runs);
  const auto sto = table::sweep_stochastic(config.sim, config.delay_model, config.sweeps.delays_ms,
                                           config.n_runs, config.sweeps.stochastic_mode);
  r.files.push_back({"tradeoff_deterministic.csv", sweep_csv(det)});
  r.files.push_back({"tradeoff_reliability.csv", sweep_csv(rel)});
  r.files.push_back({"tradeoff_stochastic.csv", sweep_csv(sto)});
  return r;
}

Report run_build_table(const ExperimentConfig& config) {
  config.validate();
  return {"build-table", {{"qoc_table.csv", table::serialize(table_for(config, config.frame))}}, {}};
}

Report run_prb(const ExperimentConfig& config) {
  config.validate();
  const auto prbs = prb_pair(config);
  const int R = config.frame.capacity;
  auto side = [&](const network::PrbRequirement& p, const network::LinkBudget& b) {
    return json{{"prbs", p.prbs},
                {"bits_per_prb_slot", num(p.bits_per_prb_slot)},
                {"robots_per_slot", R / p.prbs},
                {"mcs_index", b.mcs_index},
                {"modulation_order", b.modulation_order},
                {"code_rate", num(b.code_rate)},
                {"overhead", num(b.overhead)},
                {"packet_bits", num(b.packet_bits)}};
  };
  json doc = {{"capacity_prbs_per_slot", R},
              {"uplink", side(prbs.uplink, config.uplink)},
              {"downlink", side(prbs.downlink, config.downlink)}};
  return {"prb", {{"prb.json", doc.dump(2) + "\n"}}, {}};
}

Report run_compare_schemes(const ExperimentConfig& config) {
  config.validate();
  if (config.schemes.size() < 2) throw ConfigError("compare-schemes: needs at least two schemes");
  Report r{"compare-schemes", {}, {}};
  const auto t = table_for(config, config.frame);
  const auto inst = make_instance(config, config.frame, t);
  const auto summaries = solve_schemes(config, inst, t, "", r.notes);

  Csv csv{"scheme", "number", "label", "mean_qoc", "mean_e2e_ms", "mean_alloc_ms", "objective",
          "mean_auc", "solve_nodes", "proven_optimal"};
  json schemes = json::array();
  for (const auto& s : summaries) {
    csv.cell(alloc::scheme_name(s.scheme)).cell(alloc::scheme_number(s.scheme)).cell(alloc::scheme_label(s.scheme));
    csv.cell(s.mean_qoc).cell(s.mean_e2e_ms).cell(s.mean_alloc_ms).cell(s.solution.objective_value);
    csv.cell(s.mean_auc).cell(s.solution.nodes).cell(s.solution.proven_optimal ? "true" : "false");
    csv.end();
    schemes.push_back({{"scheme", std::string(alloc::scheme_name(s.scheme))},
                       {"number", alloc::scheme_number(s.scheme)},
                       {"label", std::string(alloc::scheme_label(s.scheme))},
                       {"mean_qoc", num(s.mean_qoc)},
                       {"total_qoc", num(s.solution.total_qoc)},
                       {"mean_e2e_ms", num(s.mean_e2e_ms)},
                       {"mean_alloc_ms", num(s.mean_alloc_ms)},
                       {"objective_value", num(s.solution.objective_value)},
                       {"mean_auc", num(s.mean_auc)},
                       {"solve_nodes", s.solution.nodes},
                       {"proven_optimal", s.solution.proven_optimal}});
    r.files.push_back({"allocation_" + std::string(alloc::scheme_name(s.scheme)) + ".json",
                       solution_json(s.solution, inst)});
  }

  // Pairwise ratios A/B. A mean-AUC ratio below 1 means scheme A spends
  // proportionally less control effort than B.
  json qoc_ratios = json::object();
  json energy_ratios = json::object();
  for (const auto& a : summaries) {
    for (const auto& b : summaries) {
      if (a.scheme == b.scheme) continue;
      const std::string key = std::string(alloc::scheme_name(a.scheme)) + "/" + std::string(alloc::scheme_name(b.scheme));
      qoc_ratios[key] = b.mean_qoc > 0.0 ? json(num(a.mean_qoc / b.mean_qoc)) : json(nullptr);
      energy_ratios[key] = b.mean_auc > 0.0 ? json(num(a.mean_auc / b.mean_auc)) : json(nullptr);
    }
  }
  json doc = {{"schemes", schemes},
              {"qoc_ratios", qoc_ratios},
              {"mean_auc_ratios", energy_ratios},
              {"ul_prbs", inst.ul_need},
              {"dl_prbs", inst.dl_need},
              {"n_robots", inst.n_robots},
              {"table_max_auc", num(t.max_auc)},
              {"seed", config.sim.seed},
              {"n_runs", config.n_runs}};
  r.files.insert(r.files.begin(), {"compare_schemes.json", doc.dump(2) + "\n"});
  r.files.insert(r.files.begin(), {"compare_schemes.csv", csv.str()});
  r.files.push_back({"qoc_table.csv", table::serialize(t)});
  return r;
}

Report run_tdd_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.tdd_patterns.empty()) throw ConfigError("tdd-sweep: needs at least one pattern");
  Report r{"tdd-sweep", {}, {}};
  Csv csv{"pattern", "scheme", "number", "label", "mean_qoc", "mean_e2e_ms", "mean_alloc_ms", "objective"};
  std::vector<Artifact> tables;
  for (const auto& pattern : config.tdd_patterns) {
    const auto frame = network::TddFrame::from_pattern(pattern, config.frame.repetitions,
                                                       config.frame.numerology, config.frame.capacity);
    const auto t = table_for(config, frame);
    const auto inst = make_instance(config, frame, t);
    for (const auto& s : solve_schemes(config, inst, t, pattern + " ", r.notes)) {
      csv.cell(pattern).cell(alloc::scheme_name(s.scheme)).cell(alloc::scheme_number(s.scheme));
      csv.cell(alloc::scheme_label(s.scheme)).cell(s.mean_qoc).cell(s.mean_e2e_ms).cell(s.mean_alloc_ms);
      csv.cell(s.solution.objective_value);
      csv.end();
    }
    tables.push_back({"qoc_table_" + pattern + ".csv", table::serialize(t)});
  }
  r.files.push_back({"tdd_sweep.csv", csv.str()});
  r.files.insert(r.files.end(), tables.begin(), tables.end());
  return r;
}

Report run_allocate(const ExperimentConfig& config, alloc::Scheme scheme,
                    const std::optional<std::string>& table_path, bool with_lp) {
  config.validate();
  Report r{"allocate", {}, {}};
  table::QocTable t;
  if (table_path) {
    std::ifstream in(*table_path);
    if (!in) throw ConfigError("cannot read QoC table " + *table_path);
    std::stringstream buf;
    buf << in.rdbuf();
    t = table::parse_table(buf.str());
  } else {
    t = table_for(config, config.frame);
    r.files.push_back({"qoc_table.csv", table::serialize(t)});
  }
  const auto inst = make_instance(config, config.frame, t);
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = alloc::solve(inst, scheme);
  r.notes.push_back(std::string(alloc::scheme_name(scheme)) + ": solved in " + format_decimal(elapsed_ms(t0)) +
                    " ms, " + std::to_string(s.nodes) + " nodes");
  r.files.insert(r.files.begin(), {"allocation_" + std::string(alloc::scheme_name(scheme)) + ".json",
                                   solution_json(s, inst)});
  if (with_lp) r.files.push_back({"model_" + std::string(alloc::scheme_name(scheme)) + ".lp", alloc::export_lp(inst, scheme)});
  return r;
}

void write_report(const Report& report, const ExperimentConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("output_dir " + config.output_dir + " is not writable: " + ec.message());
  const std::string hash = config_hash(config);
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(config.output_dir) / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("cannot write " + p.string());
  };
  for (const auto& a : report.files) {
    write(a.name, a.content);
    json meta = {{"command", report.command},
                 {"file", a.name},
                 {"seed", config.sim.seed},
                 {"n_runs", config.n_runs},
                 {"profile", std::string(to_string(config.profile))},
                 {"config_hash", hash},
                 {"versions",
                  {{"toolkit", std::string(kToolkitVersion)},
                   {"table_format", kTableFormatVersion},
                   {"solver", std::string(kSolverVersion)}}}};
    write(a.name + ".meta.json", meta.dump(2) + "\n");
  }
}

}  // namespace qoc::exp
