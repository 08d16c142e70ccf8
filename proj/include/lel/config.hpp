#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lel/basis.hpp"
#include "lel/classical.hpp"
#include "lel/common.hpp"
#include "lel/entropy_trace.hpp"

namespace lel {

enum class Mode { quantum, classical };

struct CubicLattice {
  int half_width = 0;  // "M"
  double delta_k = 1.0;
};

struct LineLattice {
  int count = 1;  // "N"
  double delta_k = 1.0;
};

using Lattice = std::variant<CubicLattice, LineLattice, classical::PhaseGrid>;

struct YukawaPotential {
  double coupling = 0.0;  // "A"
  double screening = 1.0;  // "mu"
};

struct KickPotential {
  double strength = 0.0;
  std::string shape = "cos";
  double kick_time = -1.0;  // negative: t_max / 2
};

using Potential = std::variant<YukawaPotential, KickPotential>;

struct PureRandomState {
  std::uint64_t seed = 0;
};

struct AppendixAState {
  std::vector<std::size_t> shells;
  CMatrix<double> mu;
  std::uint64_t seed = 0;
};

struct ShellMixedState {
  std::size_t shell = 0;
};

struct SinglePRowState {
  double p0 = 0.0;
};

using InitialState = std::variant<PureRandomState, AppendixAState, ShellMixedState, SinglePRowState>;

struct OutputPaths {
  std::string csv = "trace.csv";
  std::string summary = "summary.json";
};

struct ExperimentConfig {
  Mode mode = Mode::quantum;
  Lattice lattice;
  Potential potential;
  InitialState initial_state;
  TimeGrid time_grid;
  OutputPaths outputs;
  std::size_t max_points = kDefaultMaxPoints;
};

/// Malformed or inconsistent configuration; carries one message per field,
/// each prefixed with the field path (e.g. "potential.mu: must be > 0").
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses strict-schema JSON. Unknown fields are errors.
ExperimentConfig validate_config(const std::string& raw_json);

/// Canonical JSON form; validate_config(to_json(c).dump()) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace lel
