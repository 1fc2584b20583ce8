#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "oscmirror/emission.hpp"
#include "oscmirror/mirror.hpp"

using namespace oscmirror;

namespace {

namespace fs = std::filesystem;

std::string need_env(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE(v != nullptr);
  return v;
}

fs::path work_root() {
  const auto d = fs::temp_directory_path() / "oscmirror_cli_tests";
  fs::create_directories(d);
  return d;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = work_root() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_cfg(const std::string& name, const std::string& text) {
  const auto p = work_root() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p.string();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int seq = 0;
  ++seq;
  const auto out_file = work_root() / ("stdout_" + std::to_string(seq) + ".txt");
  const auto err_file = work_root() / ("stderr_" + std::to_string(seq) + ".txt");
  const std::string cmd = need_env("OSCMIRROR_BIN") + " " + args + " >" + out_file.string() +
                          " 2>" + err_file.string();
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

void check_csv(const fs::path& p, const std::string& header, std::size_t expect_rows) {
  const std::string text = slurp(p);
  REQUIRE(!text.empty());
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == header);
  const std::size_t ncols = std::size_t(std::count(header.begin(), header.end(), ',')) + 1;
  std::size_t rows = 0;
  bool fields_ok = true, numbers_ok = true;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ls(line);
    std::string tok;
    std::size_t fields = 0;
    while (std::getline(ls, tok, ',')) {
      ++fields;
      if (fields == 2 && header.find(",status") != std::string::npos) continue;
      char* end = nullptr;
      (void)std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) numbers_ok = false;
    }
    if (fields != ncols) fields_ok = false;
  }
  CHECK(rows == expect_rows);
  CHECK(fields_ok);
  CHECK(numbers_ok);
}

const char* small_decay_cfg =
    "task = decay\n"
    "epsilon = 0.6\n"
    "nu = 10\n"
    "tau = 0.5\n"
    "k0l0 = 0.8\n"
    "k0R = 0.9\n"
    "[time_grid]\n"
    "dt = 0.005\n"
    "n_steps = 601\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("decay run: files, formats, metadata") {
  const auto cfg = write_cfg("decay.cfg", small_decay_cfg);
  const auto out = fresh_dir("decay_run");
  const auto r = run_cli("decay --config " + cfg + " --out " + out.string());
  CHECK(r.code == 0);

  check_csv(out / "decay_oscillating.csv", "t,re_c,im_c,abs2_c", 601);
  check_csv(out / "decay_static.csv", "t,re_c,im_c,abs2_c", 601);

  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  CHECK(meta.at("task") == "decay");
  CHECK(meta.at("scenario").at("epsilon") == 0.6);
  CHECK(meta.at("scenario").at("omega0_tau") == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(meta.at("options").at("method") == "dde");
  CHECK(meta.at("derived").at("omega0_tau_was_derived") == true);
  CHECK(meta.at("derived").at("dt_effective") == 0.005);
  CHECK(meta.at("derived").contains("gamma_eff"));
  CHECK(meta.at("derived").contains("abs2_final"));
  CHECK(meta.at("warnings").is_array());
  CHECK(meta.at("tool_version").is_string());

  /* first row of the trace starts at full excitation */
  std::istringstream ss(slurp(out / "decay_oscillating.csv"));
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  CHECK(line == "0,1,0,1");
}

TEST_CASE("identical configs give byte-identical outputs") {
  const auto cfg = write_cfg("decay.cfg", small_decay_cfg);
  const auto out1 = fresh_dir("repeat_1");
  const auto out2 = fresh_dir("repeat_2");
  CHECK(run_cli("decay --config " + cfg + " --out " + out1.string()).code == 0);
  CHECK(run_cli("decay --config " + cfg + " --out " + out2.string()).code == 0);
  CHECK(slurp(out1 / "decay_oscillating.csv") == slurp(out2 / "decay_oscillating.csv"));
  CHECK(slurp(out1 / "decay_static.csv") == slurp(out2 / "decay_static.csv"));
  CHECK(slurp(out1 / "metadata.json") == slurp(out2 / "metadata.json"));
}

TEST_CASE("the emitted metadata reproduces the run") {
  const auto cfg = write_cfg("decay.cfg", small_decay_cfg);
  const auto out1 = fresh_dir("meta_src");
  CHECK(run_cli("decay --config " + cfg + " --out " + out1.string()).code == 0);
  const auto out2 = fresh_dir("meta_rerun");
  const auto r =
      run_cli("decay --config " + (out1 / "metadata.json").string() + " --out " + out2.string());
  CHECK(r.code == 0);
  CHECK(slurp(out1 / "decay_oscillating.csv") == slurp(out2 / "decay_oscillating.csv"));
  CHECK(slurp(out1 / "decay_static.csv") == slurp(out2 / "decay_static.csv"));
}

TEST_CASE("configuration errors exit with code 2") {
  const auto cfg = write_cfg("decay.cfg", small_decay_cfg);
  const auto out = fresh_dir("cfg_errors");

  const auto bad_eps =
      run_cli("decay --config " + cfg + " --set epsilon=1.5 --out " + out.string());
  CHECK(bad_eps.code == 2);
  CHECK(bad_eps.err.find("epsilon") != std::string::npos);

  const auto unknown_cfg = write_cfg("unknown.cfg",
                                     "task = decay\n"
                                     "epsilon = 0.5\n"
                                     "frobnicate = 1\n");
  const auto unknown = run_cli("decay --config " + unknown_cfg + " --out " + out.string());
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find(":3:") != std::string::npos);
  CHECK(unknown.err.find("frobnicate") != std::string::npos);

  CHECK(run_cli("decay --out " + out.string()).code == 2);          // --config is required
  CHECK(run_cli("--config " + cfg).code == 2);                      // a task is required
  CHECK(run_cli("decay --config /nonexistent.cfg").code == 2);
}

TEST_CASE("quadrature failure exits with code 3 naming the operation") {
  const auto cfg = write_cfg("coarse.cfg",
                             "task = spectrum\n"
                             "mode = filtered\n"
                             "epsilon = 0.5\n"
                             "tau = 0.3\n"
                             "omega0_tau = 0.9\n"
                             "[frequency_grid]\n"
                             "omega_min = -1\n"
                             "omega_max = 1\n"
                             "n_points = 3\n"
                             "[filter]\n"
                             "Gamma_D = 0.007\n"
                             "quadrature_dt = 7.7\n");
  const auto out = fresh_dir("coarse_run");
  const auto r = run_cli("spectrum --config " + cfg + " --out " + out.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("filtered_spectrum_scan") != std::string::npos);
}

TEST_CASE("sweep: summary, subdirectories, concurrency determinism") {
  const auto cfg = write_cfg("sweep.cfg",
                             "task = sweep\n"
                             "epsilon = 0.5\n"
                             "nu = 1\n"
                             "tau = 1\n"
                             "[sweep]\n"
                             "parameter = k0l0\n"
                             "values = 0.5, 1, 1.5\n"
                             "sweep_task = rates\n");
  const auto out1 = fresh_dir("sweep_j1");
  const auto out4 = fresh_dir("sweep_j4");
  CHECK(run_cli("sweep --config " + cfg + " --jobs 1 --out " + out1.string()).code == 0);
  CHECK(run_cli("sweep --config " + cfg + " --jobs 4 --out " + out4.string()).code == 0);

  check_csv(out1 / "summary.csv", "k0l0,status,gamma_eff,omega_shift,abs_pi0", 3);
  CHECK(slurp(out1 / "summary.csv") == slurp(out4 / "summary.csv"));
  CHECK(slurp(out1 / "metadata.json") == slurp(out4 / "metadata.json"));

  for (const char* sub : {"k0l0_0.5", "k0l0_1", "k0l0_1.5"}) {
    CHECK(fs::exists(out1 / sub / "metadata.json"));
  }

  /* summary rows carry the rates computed for each point */
  std::istringstream ss(slurp(out1 / "summary.csv"));
  std::string line;
  std::getline(ss, line);
  for (double z : {0.5, 1.0, 1.5}) {
    REQUIRE(std::getline(ss, line));
    std::stringstream ls(line);
    std::string v, status, ge, sh, p0;
    std::getline(ls, v, ',');
    std::getline(ls, status, ',');
    std::getline(ls, ge, ',');
    std::getline(ls, sh, ',');
    std::getline(ls, p0, ',');
    CHECK(status == "ok");
    ScenarioParams p;
    p.epsilon = 0.5;
    p.nu = 1.0;
    p.tau = 1.0;
    p.k0l0 = z;
    const auto rates = modified_rates(p);
    CHECK(std::stod(ge) == doctest::Approx(rates.gamma_eff).epsilon(1e-12));
    CHECK(std::stod(sh) == doctest::Approx(rates.shift).epsilon(1e-12));
    CHECK(std::stod(p0) ==
          doctest::Approx(std::abs(pi_factor_closed(0, z, 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("sweep: per-point failures are recorded and exit nonzero") {
  const auto cfg = write_cfg("sweep_fail.cfg",
                             "task = sweep\n"
                             "epsilon = 0.5\n"
                             "k0l0 = 0.8\n"
                             "tau = 0.1\n"
                             "[frequency_grid]\n"
                             "omega_min = -10\n"
                             "omega_max = 10\n"
                             "n_points = 51\n"
                             "[sweep]\n"
                             "parameter = nu\n"
                             "values = 0, 5\n"
                             "sweep_task = channelB\n");
  const auto out = fresh_dir("sweep_fail");
  const auto r = run_cli("sweep --config " + cfg + " --out " + out.string());
  CHECK(r.code == 3);

  const std::string summary = slurp(out / "summary.csv");
  CHECK(summary.find("0,error,nan") != std::string::npos);
  CHECK(summary.find("5,ok,") != std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  CHECK(meta.at("derived").at("n_failed") == 1);
  CHECK(meta.at("derived").at("failures").size() == 1);
  CHECK(fs::exists(out / "nu_5" / "channelB_total.csv"));
}

TEST_CASE("sweep with an empty axis is rejected") {
  const auto cfg = write_cfg("sweep_empty.cfg",
                             "task = sweep\n"
                             "[sweep]\n"
                             "parameter = k0l0\n"
                             "values =\n"
                             "sweep_task = rates\n");
  CHECK(run_cli("sweep --config " + cfg).code == 2);
}

TEST_CASE("version flag") {
  const auto r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("bundled example configs all run") {
  const std::string dir = need_env("OSCMIRROR_CONFIG_DIR");
  const struct {
    const char* name;
    const char* task;
    const char* primary;
    } jobs[] = {
        {"rates_slow_mirror.cfg", "sweep", "summary.csv"},
        {"decay_echoes.cfg", "decay", "decay_oscillating.csv"},
        {"rates_vs_amplitude.cfg", "sweep", "summary.csv"},
        {"modes_restored_rate.cfg", "channelA", "channelA.csv"},
        {"modes_parity_sweep.cfg", "sweep", "summary.csv"},
        {"modes_long_delay.cfg", "channelA", "channelA.csv"},
        {"spectrum_ideal_comb.cfg", "spectrum", "spectrum.csv"},
        {"spectrum_amplitude_sweep.cfg", "sweep", "summary.csv"},
    };
  for (const auto& j : jobs) {
    CAPTURE(j.name);
    const auto out = fresh_dir(std::string("bundled_") + j.name);
    const auto r = run_cli(std::string(j.task) + " --config " + dir + "/" + j.name + " --out " +
                           out.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(out / j.primary));
    CHECK(fs::exists(out / "metadata.json"));
  }
}

}  // TEST_SUITE
