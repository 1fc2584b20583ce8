#include "oscmirror/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "oscmirror/emission.hpp"
#include "oscmirror/field_populations.hpp"
#include "oscmirror/mirror.hpp"
#include "oscmirror/spectrum.hpp"
#include "oscmirror/version.hpp"

namespace oscmirror {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<Eigen::ArrayXd>& cols) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  const Eigen::Index rows = cols.empty() ? 0 : cols.front().size();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << fmt17(cols[c][r]);
    out << "\n";
  }
}

void trace_columns(const AmplitudeTrace& tr, std::vector<Eigen::ArrayXd>& cols) {
  cols.push_back(tr.grid.points());
  cols.push_back(tr.values.real());
  cols.push_back(tr.values.imag());
  cols.push_back(tr.values.abs2());
}

void profile_columns(const ModeAmplitudeProfile& prof, std::vector<Eigen::ArrayXd>& cols) {
  cols.push_back(prof.grid.points());
  cols.push_back(prof.values.real());
  cols.push_back(prof.values.imag());
  cols.push_back(prof.values.abs2());
}

json scenario_json(const ScenarioParams& s) {
  json j{{"gamma", s.gamma},   {"epsilon", s.epsilon},       {"nu", s.nu},
         {"tau", s.tau},       {"k0l0", s.k0l0},             {"k0R", s.k0R},
         {"omega0_tau", s.omega0_tau}, {"d_over_c", s.d_over_c}};
  if (s.omega0_over_gamma) j["omega0_over_gamma"] = *s.omega0_over_gamma;
  return j;
}

json config_json(const RunConfig& cfg) {
  json j;
  j["task"] = cfg.task;
  j["scenario"] = scenario_json(cfg.scenario);
  json opt;
  opt["method"] = cfg.method;
  opt["regime"] = cfg.regime;
  opt["mode"] = cfg.mode;
  opt["m_max"] = cfg.m_max;
  opt["n_max"] = cfg.n_max;
  opt["peak_normalize"] = cfg.peak_normalize;
  if (cfg.t_snapshot >= 0.0) opt["t_snapshot"] = cfg.t_snapshot;
  j["options"] = opt;
  if (cfg.time_grid)
    j["time_grid"] = {{"t_start", cfg.time_grid->t_start},
                      {"dt", cfg.time_grid->dt},
                      {"n_steps", cfg.time_grid->n_steps}};
  if (cfg.frequency_grid)
    j["frequency_grid"] = {{"omega_min", cfg.frequency_grid->omega_min},
                           {"omega_max", cfg.frequency_grid->omega_max},
                           {"n_points", cfg.frequency_grid->n_points}};
  if (cfg.filter)
    j["filter"] = {{"Gamma_D", cfg.filter->Gamma_D},
                   {"t_measure", cfg.filter->t_measure},
                   {"quadrature_dt", cfg.filter->quadrature_dt}};
  if (cfg.sweep)
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"values", cfg.sweep->values},
                  {"sweep_task", cfg.sweep->task}};
  return j;
}

json issues_json(const std::vector<TimescaleIssue>& issues) {
  json arr = json::array();
  for (const auto& is : issues)
    arr.push_back((is.severity == IssueSeverity::warning ? "warning: " : "note: ") + is.message);
  return arr;
}

void write_metadata(const fs::path& dir, const json& meta) {
  std::ofstream out(dir / "metadata.json", std::ios::binary);
  if (!out) throw config_error("cannot write '" + (dir / "metadata.json").string() + "'");
  out << meta.dump(2) << "\n";
}

json run_decay(const RunConfig& cfg, const fs::path& dir, json& derived) {
  const TimeGrid& grid = *cfg.time_grid;
  ScenarioParams stat = cfg.scenario;
  stat.k0l0 = 0.0;

  AmplitudeTrace osc, ref;
  if (cfg.method == "dde") {
    osc = dde_solve(cfg.scenario, grid);
    ref = dde_solve(stat, grid);
  } else if (cfg.method == "analytic") {
    osc = analytic_first_order(cfg.scenario, grid, cfg.m_max);
    ref = analytic_first_order(stat, grid, cfg.m_max);
  } else {
    osc = markov_amplitude(cfg.scenario, grid, cfg.n_max);
    ref = markov_amplitude(stat, grid, cfg.n_max);
  }
  std::vector<Eigen::ArrayXd> cols;
  trace_columns(osc, cols);
  write_csv(dir / "decay_oscillating.csv", {"t", "re_c", "im_c", "abs2_c"}, cols);
  cols.clear();
  trace_columns(ref, cols);
  write_csv(dir / "decay_static.csv", {"t", "re_c", "im_c", "abs2_c"}, cols);

  derived["dt_effective"] = osc.grid.dt;
  derived["frame_shift_dropped"] = osc.frame_shift;
  derived["abs2_final"] = std::norm(complexd(osc.values[osc.values.size() - 1]));
  return derived;
}

json run_channel_a(const RunConfig& cfg, const fs::path& dir, json& derived) {
  const FrequencyGrid& grid = *cfg.frequency_grid;
  ModeAmplitudeProfile prof;
  if (cfg.regime == "markov")
    prof = channel_a_steady_markov(cfg.scenario, grid, cfg.n_max);
  else if (cfg.regime == "nonmarkov")
    prof = channel_a_steady_nonmarkov(cfg.scenario, grid, cfg.m_max);
  else
    prof = channel_a_time_profile(cfg.scenario, cfg.t_snapshot, grid, cfg.n_max);
  std::vector<Eigen::ArrayXd> cols;
  profile_columns(prof, cols);
  write_csv(dir / "channelA.csv", {"omega_minus_omega0", "re_c", "im_c", "abs2_c"}, cols);
  derived["channel_probability"] = profile_probability(prof);
  return derived;
}

json run_channel_b(const RunConfig& cfg, const fs::path& dir, json& derived) {
  const FrequencyGrid& grid = *cfg.frequency_grid;
  const auto carrier = channel_b_carrier(cfg.scenario, grid);
  const auto side = channel_b_sidebands(cfg.scenario, grid, cfg.m_max);
  ModeAmplitudeProfile total = carrier;
  total.values += side.values;

  std::vector<Eigen::ArrayXd> cols;
  profile_columns(carrier, cols);
  write_csv(dir / "channelB_carrier.csv", {"omega_minus_omega0", "re_c", "im_c", "abs2_c"}, cols);
  cols.clear();
  profile_columns(side, cols);
  write_csv(dir / "channelB_sidebands.csv", {"omega_minus_omega0", "re_c", "im_c", "abs2_c"},
            cols);
  cols.clear();
  profile_columns(total, cols);
  write_csv(dir / "channelB_total.csv", {"omega_minus_omega0", "re_c", "im_c", "abs2_c"}, cols);

  derived["carrier_probability"] = profile_probability(carrier);
  derived["sideband_probability"] = profile_probability(side);
  derived["total_probability"] = profile_probability(total);
  return derived;
}

json run_spectrum(const RunConfig& cfg, const fs::path& dir, json& derived) {
  const FrequencyGrid& grid = *cfg.frequency_grid;
  SpectrumResult res;
  if (cfg.mode == "ideal") {
    res = spectrum_ideal(cfg.scenario, grid, cfg.m_max, cfg.peak_normalize);
  } else {
    const FilterOptions& f = *cfg.filter;
    const double t = f.t_measure > 0.0 ? f.t_measure : 30.0 / f.Gamma_D;
    res = filtered_spectrum_scan(cfg.scenario, f.Gamma_D, t, grid, f.quadrature_dt, cfg.n_max,
                                 cfg.peak_normalize);
    derived["t_measure"] = t;
  }
  write_csv(dir / "spectrum.csv",
            {"omega_minus_omega0", res.peak_normalized ? "S_normalized" : "S_raw"},
            {grid.points(), res.values});

  const auto tab = sideband_strengths(cfg.scenario, cfg.m_max);
  derived["peak_raw"] = res.peak_raw;
  Eigen::Index imax = 0;
  res.values.maxCoeff(&imax);
  derived["peak_omega"] = grid.points()[imax];
  derived["b0_re"] = tab.b0.real();
  derived["b0_im"] = tab.b0.imag();
  derived["m_max_used"] = tab.m_max;
  return derived;
}

json point_metrics(const std::string& sweep_task, const json& meta) {
  const json& d = meta.at("derived");
  json m = json::object();
  if (sweep_task == "decay") {
    m["abs2_final"] = d.at("abs2_final");
  } else if (sweep_task == "channelA") {
    m["probability"] = d.at("channel_probability");
  } else if (sweep_task == "channelB") {
    m["probability"] = d.at("total_probability");
  } else if (sweep_task == "spectrum") {
    m["peak_omega"] = d.at("peak_omega");
    m["peak_raw"] = d.at("peak_raw");
  }
  return m;
}

std::vector<std::string> metric_names(const std::string& sweep_task) {
  if (sweep_task == "rates") return {"gamma_eff", "omega_shift", "abs_pi0"};
  if (sweep_task == "decay") return {"abs2_final"};
  if (sweep_task == "spectrum") return {"peak_omega", "peak_raw"};
  return {"probability"};
}

}  // namespace

json run_task(const RunConfig& cfg, const std::string& out_dir) {
  validate_config(cfg);
  if (cfg.task == "sweep") throw config_error("run_task cannot execute a sweep");
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const auto rates = modified_rates(cfg.scenario);
  const complexd pi0 = pi_factor_sum(0, cfg.scenario.k0l0, cfg.scenario.nu * cfg.scenario.tau);
  json derived;
  derived["gamma_eff"] = rates.gamma_eff;
  derived["omega_shift"] = rates.shift;
  derived["pi0_re"] = pi0.real();
  derived["pi0_im"] = pi0.imag();
  derived["omega0_tau_was_derived"] = !cfg.omega0_tau_explicit;

  if (cfg.task == "decay") run_decay(cfg, dir, derived);
  else if (cfg.task == "channelA") run_channel_a(cfg, dir, derived);
  else if (cfg.task == "channelB") run_channel_b(cfg, dir, derived);
  else run_spectrum(cfg, dir, derived);

  json meta = config_json(cfg);
  meta["derived"] = derived;
  meta["warnings"] = issues_json(validate_timescales(cfg.scenario));
  meta["tool_version"] = tool_version;
  write_metadata(dir, meta);
  return meta;
}

int run_sweep(const RunConfig& cfg, const std::string& out_dir, unsigned jobs) {
  validate_config(cfg);
  if (cfg.task != "sweep") throw config_error("run_sweep requires task = sweep");
  const SweepSpec& sw = *cfg.sweep;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  struct Point {
    std::string status = "ok";
    std::string error;
    json metrics;
    std::string subdir;
  };
  const std::size_t n = sw.values.size();
  std::vector<Point> pts(n);

  const auto run_point = [&](std::size_t i) {
    Point& pt = pts[i];
    const double v = sw.values[i];
    char vbuf[32];
    std::snprintf(vbuf, sizeof vbuf, "%.10g", v);
    pt.subdir = sw.parameter + "_" + vbuf;
    try {
      RunConfig point = cfg;
      point.sweep.reset();
      set_scenario_field(point.scenario, sw.parameter, v);
      if (sw.parameter == "omega0_tau") point.omega0_tau_explicit = true;
      if (sw.parameter == "k0R" && !point.omega0_tau_explicit)
        point.scenario.omega0_tau = ScenarioParams::derived_phase(point.scenario.k0R);
      const fs::path pdir = dir / pt.subdir;
      if (sw.task == "rates") {
        point.scenario.validate();
        const auto rates = modified_rates(point.scenario);
        const complexd pi0 =
            pi_factor_sum(0, point.scenario.k0l0, point.scenario.nu * point.scenario.tau);
        pt.metrics["gamma_eff"] = rates.gamma_eff;
        pt.metrics["omega_shift"] = rates.shift;
        pt.metrics["abs_pi0"] = std::abs(pi0);
        fs::create_directories(pdir);
        json meta;
        meta["scenario"] = scenario_json(point.scenario);
        meta["derived"] = pt.metrics;
        meta["tool_version"] = tool_version;
        write_metadata(pdir, meta);
      } else {
        point.task = sw.task;
        const json meta = run_task(point, pdir.string());
        pt.metrics = point_metrics(sw.task, meta);
      }
    } catch (const std::exception& e) {
      pt.status = "error";
      pt.error = e.what();
      pt.metrics = json::object();
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, unsigned(n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          run_point(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  /* summary in axis order regardless of completion order */
  const auto names = metric_names(sw.task);
  std::ofstream out(dir / "summary.csv", std::ios::binary);
  if (!out) throw config_error("cannot write '" + (dir / "summary.csv").string() + "'");
  out << sw.parameter << ",status";
  for (const auto& nm : names) out << "," << nm;
  out << "\n";
  int failures = 0;
  json fail_list = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    out << fmt17(sw.values[i]) << "," << pts[i].status;
    for (const auto& nm : names) {
      out << ",";
      if (pts[i].metrics.contains(nm)) out << fmt17(pts[i].metrics[nm].get<double>());
      else out << "nan";
    }
    out << "\n";
    if (pts[i].status != "ok") {
      ++failures;
      fail_list.push_back({{"value", sw.values[i]}, {"error", pts[i].error}});
    }
  }
  out.close();

  json meta = config_json(cfg);
  meta["derived"] = {{"n_points", n}, {"n_failed", failures}};
  meta["warnings"] = issues_json(validate_timescales(cfg.scenario));
  if (!fail_list.empty()) meta["derived"]["failures"] = fail_list;
  meta["tool_version"] = tool_version;
  write_metadata(dir, meta);
  return failures;
}

int run_config(const RunConfig& cfg, const std::string& out_dir, unsigned jobs) {
  if (cfg.task == "sweep") return run_sweep(cfg, out_dir, jobs);
  run_task(cfg, out_dir);
  return 0;
}

}  // namespace oscmirror
