#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oscmirror/scenario.hpp"

namespace oscmirror {

struct FilterOptions {
  double Gamma_D = 0.0;
  double t_measure = 0.0;       // 0 -> default 30/Gamma_D
  double quadrature_dt = 0.0;   // 0 -> rule-based default
};

struct SweepSpec {
  std::string parameter;        // a ScenarioParams field name
  std::vector<double> values;
  std::string task = "rates";   // rates, decay, channelA, channelB, spectrum
};

/** A fully resolved run request: one task plus everything it needs. */
struct RunConfig {
  std::string task;             // decay, channelA, channelB, spectrum, sweep
  ScenarioParams scenario;
  bool omega0_tau_explicit = false;  // false: derived as 2*k0R mod 2pi
  std::optional<TimeGrid> time_grid;
  std::optional<FrequencyGrid> frequency_grid;
  std::optional<FilterOptions> filter;
  std::optional<SweepSpec> sweep;
  std::string method = "dde";   // decay: dde | analytic | markov
  std::string regime = "markov";  // channelA: markov | nonmarkov | time
  std::string mode = "ideal";   // spectrum: ideal | filtered
  double t_snapshot = -1.0;     // channelA regime=time: evaluation time
  int m_max = -1;
  int n_max = -1;
  bool peak_normalize = true;
  std::string output_dir = "out";
};

/**
 * Load a config file (INI-style key = value with [time_grid],
 * [frequency_grid], [filter] and [sweep] sections, or a JSON object with the
 * same structure; JSON is detected by a leading '{'). overrides are
 * "key=value" pairs applied on top, with dotted names for section keys
 * (e.g. "time_grid.dt=0.01"). Errors carry the file line (INI) and the key
 * name. The result is validated with validate_config.
 */
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/** Task-level consistency checks (grid presence, enum values, sweep axis). */
void validate_config(const RunConfig& cfg);

/** Assign one scenario field by name; throws config_error for unknown names. */
void set_scenario_field(ScenarioParams& s, const std::string& name, double value);

}  // namespace oscmirror
