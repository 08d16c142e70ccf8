// Command-line front end: run a config, run the invariant checks, or run a
// named demo.
//
// Exit codes: 0 ok, 1 unexpected error, 2 config error, 3 invariant
// violation, 4 dimension cap exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lel/config.hpp"
#include "lel/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitCap = 4;

int report_run(const lel::RunSummary& summary, const std::filesystem::path& out_dir,
               const lel::ExperimentConfig& cfg) {
  std::cout << "wrote " << (out_dir / cfg.outputs.csv).string() << " and "
            << (out_dir / cfg.outputs.summary).string() << "\n";
  for (const auto& [name, ok] : summary.checks) {
    std::cout << (ok ? "  pass " : "  FAIL ") << name << "\n";
  }
  return summary.all_passed() ? 0 : kExitInvariant;
}

int run_config_text(const std::string& text, const std::string& out_dir) {
  const lel::ExperimentConfig cfg = lel::validate_config(text);
  const lel::RunSummary summary = lel::run(cfg, out_dir);
  return report_run(summary, out_dir, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouville-space effective-state laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", config_path, "Path to the experiment config")->required();
  run_cmd->add_option("--out-dir", out_dir, "Directory for CSV and summary output");

  app.add_subcommand("check", "Run the invariant suites on built-in systems");

  std::string demo_name;
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in experiment");
  demo_cmd->add_option("name", demo_name, "Demo name")
      ->required()
      ->check(CLI::IsMember(lel::demo_names()));
  demo_cmd->add_option("--out-dir", out_dir, "Directory for CSV and summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "cannot read config " << config_path << "\n";
        return kExitConfig;
      }
      std::stringstream buf;
      buf << f.rdbuf();
      return run_config_text(buf.str(), out_dir);
    }
    if (*demo_cmd) {
      return run_config_text(lel::demo_config(demo_name), out_dir);
    }
    return lel::run_checks(std::cout) ? 0 : kExitInvariant;
  } catch (const lel::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const lel::DimensionCapError& e) {
    std::cerr << "dimension cap: " << e.what() << "\n";
    return kExitCap;
  } catch (const lel::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
