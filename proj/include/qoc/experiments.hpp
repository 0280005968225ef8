// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qoc/allocator.hpp"
#include "qoc/consensus.hpp"
#include "qoc/network.hpp"
#include "qoc/qoc_table.hpp"

namespace qoc::exp {

inline constexpr std::string_view kToolkitVersion = "1.0.0";
inline constexpr int kTableFormatVersion = 1;
inline constexpr std::string_view kSolverVersion = "bnb-1";

enum class Profile { desk, paper };

Profile profile_from_string(std::string_view text);
std::string_view to_string(Profile p);

struct SweepSpec {
  std::vector<double> delays_ms;
  std::vector<double> reliabilities;
  table::StochasticMode stochastic_mode = table::StochasticMode::fixed_pair;
};

/// Everything one CLI invocation needs.
struct ExperimentConfig {
  Profile profile = Profile::desk;
  consensus::SimConfig sim;
  network::DelayModel delay_model;
  network::TddFrame frame;
  network::LinkBudget uplink;
  network::LinkBudget downlink;
  std::string mcs_table_path;
  std::vector<alloc::Scheme> schemes;
  SweepSpec sweeps;
  std::vector<std::string> tdd_patterns;
  table::TableMode table_mode = table::TableMode::pair;
  std::string output_dir = "out";
  int n_runs = 200;

  /// Throws ConfigError naming the first invalid sub-config.
  void validate() const;
};

/// Built-in defaults. desk: N = 10, 200 runs. paper: N = 80, 1000 runs.
ExperimentConfig default_config(Profile profile);

/// Overlays a JSON document on the profile defaults. A "profile" key in the
/// document selects the base unless `profile` is given. Relative paths are
/// resolved against `base_dir`. The result is validated.
ExperimentConfig config_from_json(std::string_view json_text, std::optional<Profile> profile,
                                  const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, std::optional<Profile> profile);

/// Canonical JSON of the effective configuration (sorted keys).
std::string canonical_json(const ExperimentConfig& config);

/// FNV-1a 64 of canonical_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// One output file, relative to the output directory.
struct Artifact {
  std::string name;
  std::string content;
};

struct Report {
  std::string command;
  std::vector<Artifact> files;
  std::vector<std::string> notes;  ///< human-oriented lines for stderr (timings etc.)
};

Report run_tradeoff(const ExperimentConfig& config);
Report run_compare_schemes(const ExperimentConfig& config);
Report run_tdd_sweep(const ExperimentConfig& config);
Report run_prb(const ExperimentConfig& config);
Report run_build_table(const ExperimentConfig& config);

/// Single solve. The table is read from `table_path` when given, otherwise
/// built. With `with_lp` the LP model is added as an artifact.
Report run_allocate(const ExperimentConfig& config, alloc::Scheme scheme,
                    const std::optional<std::string>& table_path, bool with_lp);

/// Writes every artifact plus a `<name>.meta.json` sidecar for each CSV and
/// JSON file. Throws ConfigError when the directory is not writable.
void write_report(const Report& report, const ExperimentConfig& config);

/// PRBs per robot for the configured link budgets.
struct PrbPair {
  network::PrbRequirement uplink;
  network::PrbRequirement downlink;
};
PrbPair prb_pair(const ExperimentConfig& config);

/// Allocation instance for the configured frame and link budgets.
alloc::Instance make_instance(const ExperimentConfig& config, const network::TddFrame& frame,
                              const table::QocTable& table);

/// JSON text of a solution with every field.
std::string solution_json(const alloc::Solution& solution, const alloc::Instance& instance);

}  // namespace qoc::exp
