#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lel/config.hpp"
#include "lel/entropy_trace.hpp"

namespace lel {

struct RunSummary {
  nlohmann::json config;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  // Quantum runs.
  double final_s_eff = 0.0;
  double final_purity = 0.0;
  bool effectively_pure_start = false;
  bool effectively_pure_end = false;
  // Classical runs.
  double initial_s_classical = 0.0;
  double final_s_classical = 0.0;
  double final_mass = 0.0;
  std::map<std::string, bool> checks;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Everything a run produces, before anything touches the filesystem.
struct RunResult {
  RunSummary summary;
  std::string csv;
};

/// Runs the experiment in memory. Throws ConfigError for inconsistencies that
/// need the built system to detect and DimensionCapError for oversize bases.
RunResult execute(const ExperimentConfig& config, unsigned workers = 1);

/// execute() plus writing CSV and summary JSON under out_dir.
RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir,
               unsigned workers = worker_count_from_env());

/// Quantum CSV: t,S_eff,S_global,tr_rho2,effectively_pure,S_E_<energy>...
std::string quantum_csv(const MomentumBasis& basis, const std::vector<TraceRow<double>>& rows);

/// Names accepted by `demo`.
std::vector<std::string> demo_names();
/// Built-in configuration JSON for a demo; throws std::invalid_argument for an unknown name.
std::string demo_config(const std::string& name);

/// Runs the invariant suites on small built-in systems, printing one line per
/// check. Returns true when all pass.
bool run_checks(std::ostream& out);

}  // namespace lel
