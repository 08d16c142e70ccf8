#include "lel/config.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "lel/json_io.hpp"

namespace lel {

namespace {

using nlohmann::json;

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration:";
  for (const auto& e : errors) {
    out += "\n  " + e;
  }
  return out;
}

// Collects field-level errors while walking a JSON object.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "must be an object");
      return false;
    }
    return true;
  }

  void only(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!keys.count(k)) {
        fail(join(path, k), "unknown field");
      }
    }
  }

  const json* field(const json& j, const std::string& path, const char* key, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
      if (required) {
        fail(join(path, key), "required field missing");
      }
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& j, const std::string& path, const char* key,
                               bool required = true) {
    const json* v = field(j, path, key, required);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      fail(join(path, key), "must be a finite number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<long long> integer(const json& j, const std::string& path, const char* key,
                                   bool required = true) {
    const json* v = field(j, path, key, required);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_number_integer()) {
      fail(join(path, key), "must be an integer");
      return std::nullopt;
    }
    return v->get<long long>();
  }

  std::optional<std::uint64_t> seed(const json& j, const std::string& path, const char* key) {
    const json* v = field(j, path, key, true);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      fail(join(path, key), "must be a nonnegative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& j, const std::string& path, const char* key,
                                    bool required = true) {
    const json* v = field(j, path, key, required);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_string()) {
      fail(join(path, key), "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string>& errors_;
};

std::optional<Lattice> read_lattice(Reader& r, const json& j, Mode mode) {
  const std::string path = "lattice";
  if (!r.object(j, path)) {
    return std::nullopt;
  }
  if (mode == Mode::classical) {
    r.only(j, path, {"nq", "np", "dq", "dp"});
    const auto nq = r.integer(j, path, "nq");
    const auto np = r.integer(j, path, "np");
    const auto dq = r.number(j, path, "dq");
    const auto dp = r.number(j, path, "dp");
    bool ok = nq && np && dq && dp;
    if (nq && *nq < 1) {
      r.fail("lattice.nq", "must be >= 1");
      ok = false;
    }
    if (np && (*np < 2 || *np % 2 != 0)) {
      r.fail("lattice.np", "must be an even integer >= 2");
      ok = false;
    }
    if (dq && !(*dq > 0.0)) {
      r.fail("lattice.dq", "must be > 0");
      ok = false;
    }
    if (dp && !(*dp > 0.0)) {
      r.fail("lattice.dp", "must be > 0");
      ok = false;
    }
    if (!ok) {
      return std::nullopt;
    }
    return classical::PhaseGrid{static_cast<int>(*nq), static_cast<int>(*np), *dq, *dp};
  }

  const bool line = j.contains("N");
  if (line) {
    r.only(j, path, {"N", "delta_k"});
  } else {
    r.only(j, path, {"M", "delta_k"});
  }
  const auto size = r.integer(j, path, line ? "N" : "M");
  const auto dk = r.number(j, path, "delta_k");
  bool ok = size && dk;
  if (size && (line ? *size < 1 : *size < 0)) {
    r.fail(line ? "lattice.N" : "lattice.M", line ? "must be >= 1" : "must be >= 0");
    ok = false;
  }
  if (size && *size > 100000) {
    r.fail(line ? "lattice.N" : "lattice.M", "unreasonably large");
    ok = false;
  }
  if (dk && !(*dk > 0.0)) {
    r.fail("lattice.delta_k", "must be > 0");
    ok = false;
  }
  if (!ok) {
    return std::nullopt;
  }
  if (line) {
    return LineLattice{static_cast<int>(*size), *dk};
  }
  return CubicLattice{static_cast<int>(*size), *dk};
}

std::optional<Potential> read_potential(Reader& r, const json& j, Mode mode) {
  const std::string path = "potential";
  if (!r.object(j, path)) {
    return std::nullopt;
  }
  if (mode == Mode::classical) {
    r.only(j, path, {"kick_strength", "kick_shape", "kick_time"});
    const auto strength = r.number(j, path, "kick_strength");
    const auto shape = r.string(j, path, "kick_shape");
    const auto when = r.number(j, path, "kick_time", false);
    bool ok = strength && shape;
    if (shape && *shape != "cos" && *shape != "linear") {
      r.fail("potential.kick_shape", "must be \"cos\" or \"linear\"");
      ok = false;
    }
    if (when && *when < 0.0) {
      r.fail("potential.kick_time", "must be >= 0");
      ok = false;
    }
    if (!ok) {
      return std::nullopt;
    }
    return KickPotential{*strength, *shape, when ? *when : -1.0};
  }
  r.only(j, path, {"A", "mu"});
  const auto a = r.number(j, path, "A");
  const auto mu = r.number(j, path, "mu");
  if (mu && !(*mu > 0.0)) {
    r.fail("potential.mu", "must be > 0");
    return std::nullopt;
  }
  if (!a || !mu) {
    return std::nullopt;
  }
  return YukawaPotential{*a, *mu};
}

std::optional<InitialState> read_initial_state(Reader& r, const json& j, Mode mode) {
  const std::string path = "initial_state";
  if (!r.object(j, path)) {
    return std::nullopt;
  }
  r.only(j, path, {"pure-random", "appendix-a", "shell-mixed", "single-p-row"});
  if (j.size() != 1) {
    r.fail(path, "exactly one initial state kind is required");
    return std::nullopt;
  }
  const auto& [kind, body] = *j.items().begin();
  const std::string sub = Reader::join(path, kind);
  const bool quantum_kind = kind != "single-p-row";
  if ((mode == Mode::quantum) != quantum_kind) {
    r.fail(sub, mode == Mode::quantum ? "not a quantum initial state"
                                      : "classical mode needs single-p-row");
    return std::nullopt;
  }
  if (!r.object(body, sub)) {
    return std::nullopt;
  }
  if (kind == "pure-random") {
    r.only(body, sub, {"seed"});
    const auto seed = r.seed(body, sub, "seed");
    if (!seed) {
      return std::nullopt;
    }
    return PureRandomState{*seed};
  }
  if (kind == "shell-mixed") {
    r.only(body, sub, {"shell"});
    const auto shell = r.integer(body, sub, "shell");
    if (shell && *shell < 0) {
      r.fail(sub + ".shell", "must be >= 0");
      return std::nullopt;
    }
    if (!shell) {
      return std::nullopt;
    }
    return ShellMixedState{static_cast<std::size_t>(*shell)};
  }
  if (kind == "single-p-row") {
    r.only(body, sub, {"p0"});
    const auto p0 = r.number(body, sub, "p0");
    if (!p0) {
      return std::nullopt;
    }
    return SinglePRowState{*p0};
  }
  // appendix-a
  r.only(body, sub, {"mu", "shells", "seed"});
  const auto seed = r.seed(body, sub, "seed");
  AppendixAState st;
  bool ok = seed.has_value();
  if (const json* shells = r.field(body, sub, "shells", true)) {
    if (!shells->is_array() || shells->empty()) {
      r.fail(sub + ".shells", "must be a non-empty array of shell ids");
      ok = false;
    } else {
      for (const auto& s : *shells) {
        if (!s.is_number_integer() || s.get<long long>() < 0) {
          r.fail(sub + ".shells", "shell ids must be nonnegative integers");
          ok = false;
          break;
        }
        st.shells.push_back(s.get<std::size_t>());
      }
    }
  } else {
    ok = false;
  }
  if (const json* mu = r.field(body, sub, "mu", true)) {
    try {
      st.mu = matrix_from_json(*mu);
      if (ok && (st.mu.rows() != static_cast<Index>(st.shells.size()) ||
                 st.mu.cols() != static_cast<Index>(st.shells.size()))) {
        r.fail(sub + ".mu", "must be square with one row per listed shell");
        ok = false;
      }
    } catch (const std::exception& e) {
      r.fail(sub + ".mu", e.what());
      ok = false;
    }
  } else {
    ok = false;
  }
  if (!ok) {
    return std::nullopt;
  }
  st.seed = *seed;
  return st;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join_errors(errors)), errors_(std::move(errors)) {}

ExperimentConfig validate_config(const std::string& raw_json) {
  std::vector<std::string> errors;
  Reader r(errors);
  json j;
  try {
    j = json::parse(raw_json);
  } catch (const json::parse_error& e) {
    if (raw_json.find_first_not_of(" \t\r\n") == std::string::npos) {
      j = json::object();
    } else {
      throw ConfigError({std::string("(document): malformed JSON: ") + e.what()});
    }
  }
  if (!r.object(j, "(document)")) {
    throw ConfigError(std::move(errors));
  }
  r.only(j, "", {"mode", "lattice", "potential", "initial_state", "time_grid", "outputs",
                 "max_points"});

  ExperimentConfig cfg;
  std::optional<Mode> mode;
  if (const auto m = r.string(j, "", "mode")) {
    if (*m == "quantum") {
      mode = Mode::quantum;
    } else if (*m == "classical") {
      mode = Mode::classical;
    } else {
      r.fail("mode", "must be \"quantum\" or \"classical\"");
    }
  }
  const json* lattice = r.field(j, "", "lattice", true);
  const json* potential = r.field(j, "", "potential", true);
  const json* initial = r.field(j, "", "initial_state", true);
  if (mode) {
    cfg.mode = *mode;
    if (lattice) {
      if (auto l = read_lattice(r, *lattice, *mode)) cfg.lattice = *l;
    }
    if (potential) {
      if (auto p = read_potential(r, *potential, *mode)) cfg.potential = *p;
    }
    if (initial) {
      if (auto s = read_initial_state(r, *initial, *mode)) cfg.initial_state = *s;
    }
  }

  if (const json* tg = r.field(j, "", "time_grid", true); tg && r.object(*tg, "time_grid")) {
    r.only(*tg, "time_grid", {"t_max", "steps"});
    const auto t_max = r.number(*tg, "time_grid", "t_max");
    const auto steps = r.integer(*tg, "time_grid", "steps");
    if (t_max && *t_max < 0.0) {
      r.fail("time_grid.t_max", "must be >= 0");
    }
    if (steps && (*steps < 1 || *steps > 1000000)) {
      r.fail("time_grid.steps", "must be between 1 and 1000000");
    }
    if (t_max && steps) {
      cfg.time_grid = {*t_max, static_cast<int>(*steps)};
    }
  }

  if (const json* out = r.field(j, "", "outputs", false); out && r.object(*out, "outputs")) {
    r.only(*out, "outputs", {"csv", "summary"});
    if (const auto csv = r.string(*out, "outputs", "csv", false)) cfg.outputs.csv = *csv;
    if (const auto sum = r.string(*out, "outputs", "summary", false)) cfg.outputs.summary = *sum;
  }
  if (const auto cap = r.integer(j, "", "max_points", false)) {
    if (*cap < 1) {
      r.fail("max_points", "must be >= 1");
    } else {
      cfg.max_points = static_cast<std::size_t>(*cap);
    }
  }

  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode == Mode::quantum ? "quantum" : "classical";
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, CubicLattice>) {
          j["lattice"] = {{"M", l.half_width}, {"delta_k", l.delta_k}};
        } else if constexpr (std::is_same_v<T, LineLattice>) {
          j["lattice"] = {{"N", l.count}, {"delta_k", l.delta_k}};
        } else {
          j["lattice"] = {{"nq", l.nq}, {"np", l.np}, {"dq", l.dq}, {"dp", l.dp}};
        }
      },
      c.lattice);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, YukawaPotential>) {
          j["potential"] = {{"A", p.coupling}, {"mu", p.screening}};
        } else {
          j["potential"] = {{"kick_strength", p.strength}, {"kick_shape", p.shape}};
          if (p.kick_time >= 0.0) {
            j["potential"]["kick_time"] = p.kick_time;
          }
        }
      },
      c.potential);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PureRandomState>) {
          j["initial_state"] = {{"pure-random", {{"seed", s.seed}}}};
        } else if constexpr (std::is_same_v<T, AppendixAState>) {
          j["initial_state"] = {
              {"appendix-a", {{"mu", matrix_to_json(s.mu)}, {"shells", s.shells}, {"seed", s.seed}}}};
        } else if constexpr (std::is_same_v<T, ShellMixedState>) {
          j["initial_state"] = {{"shell-mixed", {{"shell", s.shell}}}};
        } else {
          j["initial_state"] = {{"single-p-row", {{"p0", s.p0}}}};
        }
      },
      c.initial_state);
  j["time_grid"] = {{"t_max", c.time_grid.t_max}, {"steps", c.time_grid.steps}};
  j["outputs"] = {{"csv", c.outputs.csv}, {"summary", c.outputs.summary}};
  j["max_points"] = c.max_points;
  return j;
}

}  // namespace lel
