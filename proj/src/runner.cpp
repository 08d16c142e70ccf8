#include "lel/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lel/classical.hpp"
#include "lel/dynamics.hpp"
#include "lel/effective_reduction.hpp"
#include "lel/quantum_states.hpp"

namespace lel {

namespace {

std::string format_number(double x, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

MomentumBasis make_basis(const ExperimentConfig& c) {
  if (const auto* cubic = std::get_if<CubicLattice>(&c.lattice)) {
    return build_basis(cubic->half_width, cubic->delta_k, c.max_points);
  }
  if (const auto* line = std::get_if<LineLattice>(&c.lattice)) {
    return build_line_basis(line->count, line->delta_k, c.max_points);
  }
  throw ConfigError({"lattice: quantum mode needs {M, delta_k} or {N, delta_k}"});
}

DensityMatrix<double> make_quantum_state(const ExperimentConfig& c, const MomentumBasis& basis,
                                         std::uint64_t& seed_out) {
  const auto dim = static_cast<Index>(basis.size());
  if (const auto* s = std::get_if<PureRandomState>(&c.initial_state)) {
    seed_out = s->seed;
    std::mt19937_64 rng(s->seed);
    return pure_to_density(random_pure_state<double>(dim, rng));
  }
  if (const auto* s = std::get_if<AppendixAState>(&c.initial_state)) {
    seed_out = s->seed;
    for (std::size_t shell : s->shells) {
      if (shell >= basis.shell_count()) {
        throw ConfigError({"initial_state.appendix-a.shells: shell " + std::to_string(shell) +
                           " does not exist (basis has " + std::to_string(basis.shell_count()) +
                           " shells)"});
      }
    }
    std::mt19937_64 rng(s->seed);
    std::vector<CVector<double>> vectors;
    for (std::size_t shell : s->shells) {
      vectors.push_back(random_shell_vector<double>(basis, shell, rng));
    }
    try {
      return appendix_a_state<double>(basis, s->shells, vectors, s->mu);
    } catch (const InvariantError& e) {
      throw ConfigError({std::string("initial_state.appendix-a.mu: ") + e.what()});
    }
  }
  if (const auto* s = std::get_if<ShellMixedState>(&c.initial_state)) {
    if (s->shell >= basis.shell_count()) {
      throw ConfigError({"initial_state.shell-mixed.shell: shell " + std::to_string(s->shell) +
                         " does not exist"});
    }
    const auto& members = basis.shells().members[s->shell];
    CMatrix<double> rho = CMatrix<double>::Zero(dim, dim);
    for (std::size_t m : members) {
      rho(static_cast<Index>(m), static_cast<Index>(m)) = 1.0 / static_cast<double>(members.size());
    }
    return DensityMatrix<double>(std::move(rho));
  }
  throw ConfigError({"initial_state: quantum mode needs a quantum initial state"});
}

RunResult execute_quantum(const ExperimentConfig& c, unsigned workers) {
  const MomentumBasis basis = make_basis(c);
  const auto* pot = std::get_if<YukawaPotential>(&c.potential);
  if (!pot) {
    throw ConfigError({"potential: quantum mode needs {A, mu}"});
  }
  RunResult out;
  const DensityMatrix<double> rho0 = make_quantum_state(c, basis, out.summary.seed);
  const Hamiltonian<double> h = build_hamiltonian(basis, pot->coupling, pot->screening);
  const std::vector<double> times = c.time_grid.points();
  const auto rows = entropy_trace(rho0, h, basis, times, workers);

  auto& checks = out.summary.checks;
  const double purity0 = global_purity(rho0);
  double max_trace = 0.0, max_herm = 0.0, min_eig = 0.0, max_purity_drift = 0.0;
  double max_s_eff = 0.0, max_s_eff_drift = 0.0, max_s_global = 0.0;
  bool always_pure = true;
  for (const auto& r : rows) {
    max_trace = std::max(max_trace, r.trace_error);
    max_herm = std::max(max_herm, r.max_hermiticity_defect);
    min_eig = std::min(min_eig, r.min_eigenvalue);
    max_purity_drift = std::max(max_purity_drift, std::abs(r.purity - purity0));
    max_s_eff = std::max(max_s_eff, r.s_eff);
    max_s_eff_drift = std::max(max_s_eff_drift, std::abs(r.s_eff - rows.front().s_eff));
    max_s_global = std::max(max_s_global, r.s_global);
    always_pure = always_pure && r.effectively_pure;
  }
  checks["trace"] = max_trace <= StateTolerance::trace;
  checks["hermitian"] = max_herm <= StateTolerance::hermiticity;
  checks["positive"] = min_eig >= StateTolerance::min_eigenvalue;
  checks["purity_conserved"] = max_purity_drift <= 1e-10;
  {
    const auto dec0 = reduce(rho0, basis);
    checks["shell_weights"] = std::abs(dec0.total_weight() - 1.0) <= 1e-10;
  }
  if (pot->coupling == 0.0) {
    // Free evolution must leave the effective state itself unchanged.
    const Propagator<double> prop(h);
    const CMatrix<double> hat0 = assemble(reduce(rho0, basis), basis);
    double drift = 0.0;
    for (double t : times) {
      const CMatrix<double> hat = assemble(reduce(prop.evolve(rho0, t), basis), basis);
      drift = std::max(drift, (hat - hat0).cwiseAbs().maxCoeff());
    }
    checks["free_effective_state_invariant"] = drift <= 1e-10;
    checks["free_effective_entropy_constant"] = max_s_eff_drift <= 1e-9;
  }
  if (basis.nondegenerate()) {
    checks["nondegenerate_no_mixing"] = max_s_eff <= 1e-9 && always_pure;
  }
  if (std::holds_alternative<PureRandomState>(c.initial_state)) {
    checks["pure_global_entropy_zero"] = max_s_global <= 1e-9;
  }

  out.summary.final_s_eff = rows.back().s_eff;
  out.summary.final_purity = rows.back().purity;
  out.summary.effectively_pure_start = rows.front().effectively_pure;
  out.summary.effectively_pure_end = rows.back().effectively_pure;
  out.csv = quantum_csv(basis, rows);
  return out;
}

RunResult execute_classical(const ExperimentConfig& c) {
  const auto* grid = std::get_if<classical::PhaseGrid>(&c.lattice);
  const auto* kick = std::get_if<KickPotential>(&c.potential);
  const auto* init = std::get_if<SinglePRowState>(&c.initial_state);
  if (!grid || !kick || !init) {
    throw ConfigError({"mode: classical runs need a phase grid, a kick and a single-p-row state"});
  }
  classical::PhaseSpaceDensity rho = [&] {
    try {
      return classical::single_p_row(*grid, init->p0);
    } catch (const std::out_of_range& e) {
      throw ConfigError({std::string("initial_state.single-p-row.p0: ") + e.what()});
    }
  }();
  const auto dv = classical::kick_shape_derivative(kick->shape);
  const double kick_time = kick->kick_time >= 0.0 ? kick->kick_time : 0.5 * c.time_grid.t_max;
  const std::vector<double> times = c.time_grid.points();

  RunResult out;
  double max_mass_err = 0.0, max_marginal_drift = 0.0;
  bool kicked = false;
  auto track_mass = [&](const classical::PhaseSpaceDensity& d) {
    max_mass_err = std::max(max_mass_err, std::abs(d.mass() - 1.0));
  };
  auto free_flow = [&](double dt) {
    if (dt <= 0.0) {
      return;
    }
    const auto before = classical::classical_reduce(rho);
    rho = classical::classical_free_flow(rho, dt);
    track_mass(rho);
    const auto after = classical::classical_reduce(rho);
    max_marginal_drift =
        std::max(max_marginal_drift, (after.density - before.density).cwiseAbs().maxCoeff());
  };
  auto maybe_kick = [&](double now) {
    if (!kicked && now >= kick_time) {
      rho = classical::apply_kick(rho, dv, kick->strength);
      track_mass(rho);
      kicked = true;
    }
  };

  std::ostringstream csv;
  csv << "t,S_classical,mass\n";
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (i > 0 && !kicked && kick_time > prev && kick_time <= t) {
      free_flow(kick_time - prev);
      maybe_kick(kick_time);
      free_flow(t - kick_time);
    } else {
      free_flow(t - prev);
    }
    maybe_kick(t);
    const double s = classical::classical_effective_entropy(classical::classical_reduce(rho));
    if (i == 0) {
      out.summary.initial_s_classical = s;
    }
    out.summary.final_s_classical = s;
    csv << format_number(t) << ',' << format_number(s) << ',' << format_number(rho.mass()) << '\n';
    prev = t;
  }
  out.summary.final_mass = rho.mass();
  out.summary.checks["mass"] = max_mass_err <= 1e-6;
  out.summary.checks["nonnegative"] = rho.values().minCoeff() >= 0.0;
  out.summary.checks["free_flow_beta_marginal_invariant"] = max_marginal_drift <= 1e-6;
  // A single p row is the minimum-entropy marginal on the grid.
  out.summary.checks["entropy_not_below_initial"] =
      out.summary.final_s_classical >= out.summary.initial_s_classical - 1e-9;
  out.csv = csv.str();
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  f << contents;
}

}  // namespace

bool RunSummary::all_passed() const {
  for (const auto& [name, ok] : checks) {
    if (!ok) {
      return false;
    }
  }
  return true;
}

nlohmann::json RunSummary::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["wall_time_s"] = wall_time_s;
  j["seed"] = seed;
  if (config.value("mode", "quantum") == "quantum") {
    j["final_S_eff"] = final_s_eff;
    j["final_tr_rho2"] = final_purity;
    j["effectively_pure_start"] = effectively_pure_start;
    j["effectively_pure_end"] = effectively_pure_end;
  } else {
    // Differential entropy of the p-marginal.
    j["initial_S_classical"] = initial_s_classical;
    j["final_S_classical"] = final_s_classical;
    j["final_mass"] = final_mass;
  }
  j["checks"] = checks;
  j["all_checks_passed"] = all_passed();
  return j;
}

std::string quantum_csv(const MomentumBasis& basis, const std::vector<TraceRow<double>>& rows) {
  std::ostringstream csv;
  csv << "t,S_eff,S_global,tr_rho2,effectively_pure";
  for (double e : basis.shells().shell_energies) {
    csv << ",S_E_" << format_number(e, 12);
  }
  csv << '\n';
  for (const auto& r : rows) {
    csv << format_number(r.t) << ',' << format_number(r.s_eff) << ',' << format_number(r.s_global)
        << ',' << format_number(r.purity) << ',' << (r.effectively_pure ? 1 : 0);
    for (double s : r.shell_entropy) {
      csv << ',' << format_number(s);
    }
    csv << '\n';
  }
  return csv.str();
}

RunResult execute(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result =
      config.mode == Mode::quantum ? execute_quantum(config, workers) : execute_classical(config);
  result.summary.config = to_json(config);
  result.summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir,
               unsigned workers) {
  RunResult result = execute(config, workers);
  write_file(out_dir / config.outputs.csv, result.csv);
  write_file(out_dir / config.outputs.summary, result.summary.to_json().dump(2) + "\n");
  return result.summary;
}

std::vector<std::string> demo_names() {
  return {"free-invariance", "nondegenerate", "yukawa-mixing", "classical-kick"};
}

std::string demo_config(const std::string& name) {
  if (name == "free-invariance") {
    return R"({
  "mode": "quantum",
  "lattice": {"M": 1, "delta_k": 1.0},
  "potential": {"A": 0.0, "mu": 1.0},
  "initial_state": {"appendix-a": {"shells": [1, 2], "mu": [[0.5, 0.25], [0.25, 0.5]], "seed": 5}},
  "time_grid": {"t_max": 5.0, "steps": 50},
  "outputs": {"csv": "free-invariance.csv", "summary": "free-invariance_summary.json"}
})";
  }
  if (name == "nondegenerate") {
    return R"({
  "mode": "quantum",
  "lattice": {"N": 16, "delta_k": 1.0},
  "potential": {"A": 1.0, "mu": 1.0},
  "initial_state": {"pure-random": {"seed": 7}},
  "time_grid": {"t_max": 10.0, "steps": 100},
  "outputs": {"csv": "nondegenerate.csv", "summary": "nondegenerate_summary.json"}
})";
  }
  if (name == "yukawa-mixing") {
    return R"({
  "mode": "quantum",
  "lattice": {"M": 1, "delta_k": 1.0},
  "potential": {"A": 0.2, "mu": 1.0},
  "initial_state": {"appendix-a": {"shells": [1, 2], "mu": [[0.5, 0.25], [0.25, 0.5]], "seed": 2024}},
  "time_grid": {"t_max": 5.0, "steps": 100},
  "outputs": {"csv": "yukawa-mixing.csv", "summary": "yukawa-mixing_summary.json"}
})";
  }
  if (name == "classical-kick") {
    return R"({
  "mode": "classical",
  "lattice": {"nq": 128, "np": 64, "dq": 0.04908738521234052, "dp": 0.05},
  "potential": {"kick_strength": 0.3, "kick_shape": "cos", "kick_time": 1.0},
  "initial_state": {"single-p-row": {"p0": 0.525}},
  "time_grid": {"t_max": 2.0, "steps": 20},
  "outputs": {"csv": "classical-kick.csv", "summary": "classical-kick_summary.json"}
})";
  }
  throw std::invalid_argument("unknown demo '" + name + "'");
}

bool run_checks(std::ostream& out) {
  bool all = true;
  auto report = [&](const std::string& name, bool ok, double value) {
    out << (ok ? "PASS " : "FAIL ") << name << " (" << format_number(value, 3) << ")\n";
    all = all && ok;
  };

  const MomentumBasis basis = build_basis(1, 1.0);
  const auto dim = static_cast<Index>(basis.size());
  std::mt19937_64 rng(20261017);

  {
    double worst = 0.0;
    for (int c = 0; c < 10; ++c) {
      const auto rho = random_density_matrix<double>(dim, 3, rng);
      const CMatrix<double> h = random_hermitian<double>(dim, rng);
      const auto rt = evolve(rho, h, 0.7 * (c + 1));
      worst = std::max(worst, std::abs(global_purity(rt) - global_purity(rho)));
    }
    report("unitarity: Tr rho^2 conserved", worst <= 1e-10, worst);
  }
  {
    const auto rho = random_density_matrix<double>(dim, 2, rng);
    const Propagator<double> prop(build_hamiltonian(basis, 0.3, 1.0));
    const auto a = prop.evolve(prop.evolve(rho, 0.4), 1.1);
    const auto b = prop.evolve(rho, 1.5);
    const double err = (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
    report("group law", err <= 1e-9, err);
  }
  {
    std::mt19937_64 small(7);
    const CMatrix<double> h = random_hermitian<double>(4, small);
    const auto rho = random_density_matrix<double>(4, 4, small);
    const auto l = liouvillian_superoperator(h);
    const double err =
        (superoperator_propagate(l, rho.matrix(), 0.9) - evolve(rho, h, 0.9).matrix())
            .cwiseAbs()
            .maxCoeff();
    report("superoperator oracle", err <= 1e-9, err);
  }
  {
    const auto rho = random_density_matrix<double>(dim, 4, rng);
    const auto dec = reduce(rho, basis);
    const auto again = reduce_matrix(assemble(dec, basis), basis);
    const double err = (assemble(again, basis) - assemble(dec, basis)).cwiseAbs().maxCoeff();
    report("reduction idempotent", err == 0.0, err);
    const Propagator<double> free(build_hamiltonian(basis, 0.0, 1.0));
    const double drift =
        (assemble(reduce(free.evolve(rho, 2.3), basis), basis) - assemble(dec, basis))
            .cwiseAbs()
            .maxCoeff();
    report("free evolution preserves effective state", drift <= 1e-10, drift);
  }
  {
    int failures = 0;
    for (int c = 0; c < 50; ++c) {
      const auto rho = pure_to_density(random_pure_state<double>(dim, rng));
      failures += is_effectively_pure(reduce(rho, basis)) ? 0 : 1;
    }
    report("strict purity implies effective purity", failures == 0, failures);
  }
  {
    const classical::PhaseGrid g{64, 40, 2.0 * std::numbers::pi / 64, 0.1};
    Eigen::MatrixXd v(g.np, g.nq);
    for (int j = 0; j < g.np; ++j) {
      for (int i = 0; i < g.nq; ++i) {
        v(j, i) = std::exp(-std::pow(g.p(j) - 0.4, 2) / 0.18) * (1.2 + std::cos(g.q(i)));
      }
    }
    const auto rho = classical::PhaseSpaceDensity::normalized(g, v);
    const auto flowed = classical::classical_free_flow(rho, 0.83);
    const double mass_err = std::abs(flowed.mass() - 1.0);
    report("classical flow conserves mass", mass_err <= 1e-6, mass_err);
    const double drift = (classical::classical_reduce(flowed).density -
                          classical::classical_reduce(rho).density)
                             .cwiseAbs()
                             .maxCoeff();
    report("classical flow preserves beta marginal", drift <= 1e-6, drift);
  }
  return all;
}

}  // namespace lel
