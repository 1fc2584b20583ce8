#include "oscmirror/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace oscmirror {

namespace {

using json = nlohmann::json;

struct RawEntry {
  std::string value;
  int line = -1;  // -1: no file line (JSON or --set)
};
using RawMap = std::map<std::string, RawEntry>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "task", "method", "regime", "mode", "m_max", "n_max", "peak_normalize", "output_dir",
      "t_snapshot",
      "scenario.gamma", "scenario.epsilon", "scenario.nu", "scenario.tau", "scenario.k0l0",
      "scenario.k0R", "scenario.omega0_tau", "scenario.d_over_c", "scenario.omega0_over_gamma",
      "time_grid.t_start", "time_grid.dt", "time_grid.n_steps",
      "frequency_grid.omega_min", "frequency_grid.omega_max", "frequency_grid.n_points",
      "filter.Gamma_D", "filter.t_measure", "filter.quadrature_dt",
      "sweep.parameter", "sweep.values", "sweep.sweep_task"};
  return k;
}

const std::set<std::string>& scenario_fields() {
  static const std::set<std::string> k = {"gamma", "epsilon", "nu",        "tau",
                                          "k0l0",  "k0R",     "omega0_tau", "d_over_c",
                                          "omega0_over_gamma"};
  return k;
}

[[noreturn]] void fail(const std::string& where, int line, const std::string& what) {
  std::ostringstream os;
  if (line > 0) os << where << ":" << line << ": " << what;
  else os << where << ": " << what;
  throw config_error(os.str());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/* bare keys are scenario fields or top-level options */
std::string normalize_key(const std::string& key, const std::string& where, int line) {
  if (key.find('.') != std::string::npos) {
    if (!known_keys().count(key)) fail(where, line, "unknown key '" + key + "'");
    return key;
  }
  if (scenario_fields().count(key)) return "scenario." + key;
  if (!known_keys().count(key)) fail(where, line, "unknown key '" + key + "'");
  return key;
}

RawMap parse_ini(std::istream& in, const std::string& where) {
  RawMap out;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"time_grid", "frequency_grid", "filter",
                                                     "sweep"};
      if (!sections.count(section)) fail(where, lineno, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, lineno, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, lineno, "empty key");
    key = section.empty() ? normalize_key(key, where, lineno) : section + "." + key;
    if (!known_keys().count(key)) fail(where, lineno, "unknown key '" + key + "'");
    if (out.count(key)) fail(where, lineno, "duplicate key '" + key + "'");
    out[key] = {value, lineno};
  }
  return out;
}

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten_json(const json& j, const std::string& where, RawMap& out) {
  static const std::set<std::string> informational = {"derived", "warnings", "tool_version"};
  static const std::set<std::string> groups = {"scenario", "time_grid", "frequency_grid",
                                               "filter", "sweep"};
  if (!j.is_object()) fail(where, -1, "top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (informational.count(key)) continue;
    if (key == "options") {
      if (!value.is_object()) fail(where, -1, "'options' must be an object");
      for (const auto& [ok, ov] : value.items()) {
        const std::string full = normalize_key(ok, where, -1);
        if (full.rfind("scenario.", 0) == 0) fail(where, -1, "unknown key 'options." + ok + "'");
        if (!ov.is_null()) out[full] = {json_scalar_to_string(ov), -1};
      }
      continue;
    }
    if (groups.count(key)) {
      if (!value.is_object()) fail(where, -1, "'" + key + "' must be an object");
      for (const auto& [sk, sv] : value.items()) {
        const std::string full = key + "." + sk;
        if (!known_keys().count(full)) fail(where, -1, "unknown key '" + full + "'");
        if (sv.is_null()) continue;
        if (sv.is_array()) {
          std::string joined;
          for (const auto& item : sv) {
            if (!joined.empty()) joined += ",";
            joined += json_scalar_to_string(item);
          }
          out[full] = {joined, -1};
        } else {
          out[full] = {json_scalar_to_string(sv), -1};
        }
      }
      continue;
    }
    const std::string full = normalize_key(key, where, -1);
    if (!value.is_null()) out[full] = {json_scalar_to_string(value), -1};
  }
}

double parse_double(const std::string& key, const std::string& where, const RawEntry& e) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    fail(where, e.line, "key '" + key + "': expected a number, got '" + e.value + "'");
  return v;
}

long parse_int(const std::string& key, const std::string& where, const RawEntry& e) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    fail(where, e.line, "key '" + key + "': expected an integer, got '" + e.value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& where, const RawEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(where, e.line, "key '" + key + "': expected true/false, got '" + e.value + "'");
}

std::vector<double> parse_values(const std::string& key, const std::string& where,
                                 const RawEntry& e) {
  std::vector<double> out;
  const std::string& s = e.value;
  if (s.find(':') != std::string::npos) {
    /* start:step:stop, stop inclusive within rounding slack */
    double a[3];
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      const auto colon = s.find(':', pos);
      const std::string tok = trim(i < 2 ? s.substr(pos, colon - pos) : s.substr(pos));
      if ((i < 2 && colon == std::string::npos) || tok.empty())
        fail(where, e.line, "key '" + key + "': expected start:step:stop");
      a[i] = parse_double(key, where, {tok, e.line});
      pos = colon + 1;
    }
    if (a[1] == 0.0 || (a[2] - a[0]) * a[1] < 0.0)
      fail(where, e.line, "key '" + key + "': step does not reach stop");
    const double slack = std::abs(a[1]) * 1e-9;
    for (double v = a[0]; (a[1] > 0.0 ? v <= a[2] + slack : v >= a[2] - slack); v += a[1])
      out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(parse_double(key, where, {tok, e.line}));
  }
  if (out.empty()) fail(where, e.line, "key '" + key + "': no values given");
  return out;
}

bool any_with_prefix(const RawMap& m, const std::string& prefix) {
  const auto it = m.lower_bound(prefix);
  return it != m.end() && it->first.rfind(prefix, 0) == 0;
}

const RawEntry* find(const RawMap& m, const std::string& key) {
  const auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

RunConfig build_config(const RawMap& m, const std::string& where) {
  RunConfig cfg;
  const auto dbl = [&](const std::string& key, double dflt) {
    const auto* e = find(m, key);
    return e ? parse_double(key, where, *e) : dflt;
  };
  const auto str = [&](const std::string& key, const std::string& dflt) {
    const auto* e = find(m, key);
    return e ? e->value : dflt;
  };

  cfg.task = str("task", "decay");
  cfg.method = str("method", "dde");
  cfg.regime = str("regime", "markov");
  cfg.mode = str("mode", "ideal");
  cfg.output_dir = str("output_dir", "out");
  cfg.t_snapshot = dbl("t_snapshot", -1.0);
  if (const auto* e = find(m, "m_max")) cfg.m_max = int(parse_int("m_max", where, *e));
  if (const auto* e = find(m, "n_max")) cfg.n_max = int(parse_int("n_max", where, *e));
  if (const auto* e = find(m, "peak_normalize"))
    cfg.peak_normalize = parse_bool("peak_normalize", where, *e);

  cfg.scenario.gamma = dbl("scenario.gamma", 1.0);
  cfg.scenario.epsilon = dbl("scenario.epsilon", 0.5);
  cfg.scenario.nu = dbl("scenario.nu", 0.0);
  cfg.scenario.tau = dbl("scenario.tau", 0.0);
  cfg.scenario.k0l0 = dbl("scenario.k0l0", 0.0);
  cfg.scenario.k0R = dbl("scenario.k0R", 0.0);
  cfg.scenario.d_over_c = dbl("scenario.d_over_c", 0.0);
  if (const auto* e = find(m, "scenario.omega0_over_gamma"))
    cfg.scenario.omega0_over_gamma = parse_double("scenario.omega0_over_gamma", where, *e);
  if (const auto* e = find(m, "scenario.omega0_tau")) {
    cfg.scenario.omega0_tau = parse_double("scenario.omega0_tau", where, *e);
    cfg.omega0_tau_explicit = true;
  } else {
    cfg.scenario.omega0_tau = ScenarioParams::derived_phase(cfg.scenario.k0R);
  }

  if (any_with_prefix(m, "time_grid.")) {
    TimeGrid g;
    g.t_start = dbl("time_grid.t_start", 0.0);
    if (!find(m, "time_grid.dt")) fail(where, -1, "time_grid: 'dt' is required");
    if (!find(m, "time_grid.n_steps")) fail(where, -1, "time_grid: 'n_steps' is required");
    g.dt = dbl("time_grid.dt", 0.0);
    const long n = parse_int("time_grid.n_steps", where, *find(m, "time_grid.n_steps"));
    if (n < 2) fail(where, find(m, "time_grid.n_steps")->line, "time_grid: n_steps must be >= 2");
    g.n_steps = std::size_t(n);
    cfg.time_grid = g;
  }
  if (any_with_prefix(m, "frequency_grid.")) {
    FrequencyGrid g;
    for (const char* req : {"frequency_grid.omega_min", "frequency_grid.omega_max",
                            "frequency_grid.n_points"})
      if (!find(m, req)) fail(where, -1, std::string("frequency_grid: '") + req + "' is required");
    g.omega_min = dbl("frequency_grid.omega_min", 0.0);
    g.omega_max = dbl("frequency_grid.omega_max", 0.0);
    const long n = parse_int("frequency_grid.n_points", where, *find(m, "frequency_grid.n_points"));
    if (n < 1)
      fail(where, find(m, "frequency_grid.n_points")->line,
           "frequency_grid: n_points must be >= 1");
    g.n_points = std::size_t(n);
    cfg.frequency_grid = g;
  }
  if (any_with_prefix(m, "filter.")) {
    FilterOptions f;
    if (!find(m, "filter.Gamma_D")) fail(where, -1, "filter: 'Gamma_D' is required");
    f.Gamma_D = dbl("filter.Gamma_D", 0.0);
    f.t_measure = dbl("filter.t_measure", 0.0);
    f.quadrature_dt = dbl("filter.quadrature_dt", 0.0);
    cfg.filter = f;
  }
  if (any_with_prefix(m, "sweep.")) {
    SweepSpec s;
    if (!find(m, "sweep.parameter")) fail(where, -1, "sweep: 'parameter' is required");
    if (!find(m, "sweep.values")) fail(where, -1, "sweep: 'values' is required");
    s.parameter = find(m, "sweep.parameter")->value;
    s.values = parse_values("sweep.values", where, *find(m, "sweep.values"));
    s.task = str("sweep.sweep_task", "rates");
    cfg.sweep = s;
  }
  return cfg;
}

void check_enum(const std::string& what, const std::string& got,
                std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (got == a) return;
  std::ostringstream os;
  os << what << " must be one of {";
  bool first = true;
  for (const char* a : allowed) {
    if (!first) os << ", ";
    os << a;
    first = false;
  }
  os << "}, got '" << got << "'";
  throw config_error(os.str());
}

void validate_task_needs(const RunConfig& cfg, const std::string& task) {
  if (task == "decay") {
    check_enum("method", cfg.method, {"dde", "analytic", "markov"});
    if (!cfg.time_grid) throw config_error("task decay requires a [time_grid] section");
  } else if (task == "channelA") {
    check_enum("regime", cfg.regime, {"markov", "nonmarkov", "time"});
    if (!cfg.frequency_grid) throw config_error("task channelA requires a [frequency_grid] section");
    if (cfg.regime == "time" && !(cfg.t_snapshot >= 0.0))
      throw config_error("channelA regime=time requires t_snapshot >= 0");
  } else if (task == "channelB") {
    if (!cfg.frequency_grid) throw config_error("task channelB requires a [frequency_grid] section");
    if (!(cfg.scenario.nu > 0.0)) throw config_error("task channelB requires nu > 0");
  } else if (task == "spectrum") {
    check_enum("mode", cfg.mode, {"ideal", "filtered"});
    if (!cfg.frequency_grid) throw config_error("task spectrum requires a [frequency_grid] section");
    if (cfg.mode == "filtered" && !cfg.filter)
      throw config_error("spectrum mode=filtered requires a [filter] section");
  } else {
    check_enum("task", task, {"decay", "channelA", "channelB", "spectrum", "sweep"});
  }
}

}  // namespace

void set_scenario_field(ScenarioParams& s, const std::string& name, double value) {
  if (name == "gamma") s.gamma = value;
  else if (name == "epsilon") s.epsilon = value;
  else if (name == "nu") s.nu = value;
  else if (name == "tau") s.tau = value;
  else if (name == "k0l0") s.k0l0 = value;
  else if (name == "k0R") s.k0R = value;
  else if (name == "omega0_tau") s.omega0_tau = value;
  else if (name == "d_over_c") s.d_over_c = value;
  else if (name == "omega0_over_gamma") s.omega0_over_gamma = value;
  else throw config_error("unknown scenario field '" + name + "'");
}

void validate_config(const RunConfig& cfg) {
  check_enum("task", cfg.task, {"decay", "channelA", "channelB", "spectrum", "sweep"});
  cfg.scenario.validate();
  if (cfg.frequency_grid) cfg.frequency_grid->validate();
  if (cfg.filter && !(cfg.filter->Gamma_D > 0.0))
    throw config_error("filter: Gamma_D must be > 0");
  if (cfg.task == "sweep") {
    if (!cfg.sweep) throw config_error("task sweep requires a [sweep] section");
    check_enum("sweep_task", cfg.sweep->task,
               {"rates", "decay", "channelA", "channelB", "spectrum"});
    if (!scenario_fields().count(cfg.sweep->parameter))
      throw config_error("sweep: unknown parameter '" + cfg.sweep->parameter + "'");
    if (cfg.sweep->values.empty()) throw config_error("sweep: values must be non-empty");
    if (cfg.sweep->task != "rates") {
      if (cfg.sweep->parameter == "nu" && cfg.sweep->task == "channelB") {
        /* the nu > 0 requirement depends on the swept value; it surfaces per point */
        if (!cfg.frequency_grid)
          throw config_error("task channelB requires a [frequency_grid] section");
      } else {
        validate_task_needs(cfg, cfg.sweep->task);
      }
    }
  } else {
    validate_task_needs(cfg, cfg.task);
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  RawMap m;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw config_error(path + ": invalid JSON: " + e.what());
    }
    flatten_json(j, path, m);
  } else {
    std::istringstream ss(text);
    m = parse_ini(ss, path);
  }

  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw config_error("--set '" + ov + "': expected key=value");
    const std::string key = normalize_key(trim(ov.substr(0, eq)), "--set " + ov, -1);
    m[key] = {trim(ov.substr(eq + 1)), -1};
  }

  RunConfig cfg = build_config(m, path);
  validate_config(cfg);
  return cfg;
}

}  // namespace oscmirror
