#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscmirror/run.hpp"
#include "oscmirror/version.hpp"

namespace {

struct TaskArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  unsigned jobs = 0;
};

void add_task(CLI::App& app, const std::string& name, const std::string& desc, TaskArgs& args,
              std::string& selected) {
  CLI::App* sub = app.add_subcommand(name, desc);
  sub->add_option("--config", args.config_path, "config file (INI-style or JSON)")
      ->required();
  sub->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
  sub->add_option("--out", args.out_dir, "output directory (default: output_dir from config)");
  sub->add_option("--jobs", args.jobs, "worker threads for sweeps (default: hardware)");
  sub->callback([&selected, name] { selected = name; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spontaneous emission of a two-level atom in front of an "
               "oscillating mirror: decay traces, photon-mode populations, "
               "emission spectra"};
  app.set_version_flag("--version", oscmirror::tool_version);
  app.require_subcommand(1);

  TaskArgs args;
  std::string selected;
  add_task(app, "decay", "excited-state amplitude vs time", args, selected);
  add_task(app, "channelA", "mirror-channel photon-mode populations", args, selected);
  add_task(app, "channelB", "open-channel photon-mode populations", args, selected);
  add_task(app, "spectrum", "emission spectrum (ideal or filtered)", args, selected);
  add_task(app, "sweep", "run a task over a parameter sweep", args, selected);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    /* the subcommand is authoritative over any task key in the file */
    args.overrides.push_back("task=" + selected);
    const oscmirror::RunConfig cfg = oscmirror::load_config(args.config_path, args.overrides);
    const std::string out = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
    const int failed = oscmirror::run_config(cfg, out, args.jobs);
    if (failed > 0) {
      std::fprintf(stderr, "%d sweep point%s failed; see summary.csv and metadata.json\n",
                   failed, failed == 1 ? "" : "s");
      return 3;
    }
    return 0;
  } catch (const oscmirror::convergence_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const oscmirror::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
