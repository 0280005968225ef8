// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qoc/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitInfeasible = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace qoc;

  CLI::App app{"QoC-aware consensus simulation and TDD slot allocation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> profile_name;
  std::optional<int> runs;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--profile", profile_name, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--runs", runs, "Monte-Carlo runs per point (overrides the config)");

  auto* tradeoff = app.add_subcommand("tradeoff", "AUC vs delay and reliability curves");
  auto* compare = app.add_subcommand("compare-schemes", "build the QoC table and solve every scheme");
  auto* tdd = app.add_subcommand("tdd-sweep", "compare schemes across TDD patterns");
  std::vector<std::string> patterns;
  tdd->add_option("--patterns", patterns, "TDD patterns (default from the config)");
  auto* prb = app.add_subcommand("prb", "uplink/downlink PRB requirement per robot");
  auto* allocate = app.add_subcommand("allocate", "single allocation solve");
  std::string scheme_name = "max-qoc";
  std::optional<std::string> table_path;
  bool with_lp = false;
  allocate->add_option("--scheme", scheme_name, "max-qoc, min-delay, max-delay, min-delay-stable or 1-4");
  allocate->add_option("--table", table_path, "existing QoC table file")->check(CLI::ExistingFile);
  allocate->add_flag("--lp", with_lp, "also write the LP model");
  auto* build = app.add_subcommand("build-table", "simulate and write the QoC table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    std::optional<exp::Profile> profile;
    if (profile_name) profile = exp::profile_from_string(*profile_name);
    exp::ExperimentConfig config = config_path.empty()
                                       ? exp::default_config(profile.value_or(exp::Profile::desk))
                                       : exp::load_config(config_path, profile);
    if (seed) config.sim.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (runs) config.n_runs = *runs;
    if (!patterns.empty()) config.tdd_patterns = patterns;

    exp::Report report;
    if (tradeoff->parsed()) {
      report = exp::run_tradeoff(config);
    } else if (compare->parsed()) {
      report = exp::run_compare_schemes(config);
    } else if (tdd->parsed()) {
      report = exp::run_tdd_sweep(config);
    } else if (prb->parsed()) {
      report = exp::run_prb(config);
    } else if (allocate->parsed()) {
      report = exp::run_allocate(config, alloc::scheme_from_string(scheme_name), table_path, with_lp);
    } else if (build->parsed()) {
      report = exp::run_build_table(config);
    }
    exp::write_report(report, config);
    for (const auto& note : report.notes) std::cerr << note << '\n';
    for (const auto& f : report.files) std::cerr << "wrote " << config.output_dir << '/' << f.name << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible (" << e.binding() << "): " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
}
