#pragma once

#include <string>

#include <json.hpp>

#include "oscmirror/config.hpp"

namespace oscmirror {

/** Execute a single (non-sweep) task: write one CSV per curve plus
 * metadata.json into out_dir, and return the metadata. The metadata is itself
 * loadable with load_config to reproduce the run. */
nlohmann::json run_task(const RunConfig& cfg, const std::string& out_dir);

/** Execute a sweep: one subdirectory per value, a combined summary.csv in
 * axis order, and metadata.json. Points run on `jobs` threads (0 picks the
 * hardware count); a failing point is recorded and does not abort the sweep.
 * Returns the number of failed points. */
int run_sweep(const RunConfig& cfg, const std::string& out_dir, unsigned jobs);

/** Dispatch on cfg.task; returns the number of failed sweep points (0 for
 * single tasks, which throw on failure). */
int run_config(const RunConfig& cfg, const std::string& out_dir, unsigned jobs = 0);

}  // namespace oscmirror
