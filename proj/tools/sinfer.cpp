/* Copyright 2026 The sinfer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// sinfer: search, estimate, calibrate and pareto subcommands.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sinfer/app/commands.hpp"

using namespace sinfer;

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware search over quantized networks for hybrid HE/GC inference"};
  app.require_subcommand(1);

  std::string config_path;
  if (const char* env = std::getenv("SINFER_CONFIG")) config_path = env;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string profile;
  app.add_option("-c,--config", config_path, "Run configuration (JSON); default $SINFER_CONFIG");
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--jobs", jobs, "Worker threads for cost evaluation")->check(CLI::PositiveNumber);
  app.add_option("--profile", profile, "\"reference\" or a calibration profile file");

  auto* search = app.add_subcommand("search", "Run the controller search");
  std::string out_dir;
  search->add_option("-o,--out", out_dir, "Output directory (default: config output_dir)");

  auto* estimate = app.add_subcommand("estimate", "Cost report for one network");
  std::string network;
  std::string csv;
  estimate->add_option("network", network, "Network file (JSON)")->required();
  estimate->add_option("--csv", csv, "Also write the per-layer CSV here");

  auto* calib = app.add_subcommand("calibrate", "Measure a calibration profile on this machine");
  std::string profile_out = "profile.json";
  CalibrateOptions copt;
  calib->add_option("-o,--out", profile_out, "Profile file to write");
  calib->add_option("--dims", copt.dims, "Ring dimensions to time");
  calib->add_option("--words", copt.words, "Ciphertext modulus widths in 62-bit words");
  calib->add_option("--reps", copt.reps, "Repetitions per measurement")->check(CLI::PositiveNumber);

  auto* pareto = app.add_subcommand("pareto", "Non-dominated rows of a trace");
  std::string trace;
  std::string pareto_out = "pareto.csv";
  pareto->add_option("trace", trace, "trace.csv from a search")->required();
  pareto->add_option("-o,--out", pareto_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  const CommandIO io{std::cout, std::cerr};
  if (pareto->parsed()) return cmd_pareto(trace, pareto_out, io);

  RunConfig cfg = default_run_config();
  try {
    if (!config_path.empty()) cfg = load_run_config(config_path);
  } catch (const ConfigError& e) {
    report_error(std::cerr, "validation", e.field(), e.what());
    return kExitValidation;
  }
  if (seed) {
    cfg.search.seed = *seed;
    cfg.pie.seed = *seed;
    copt.seed = *seed;
  }
  if (jobs) {
    cfg.search.jobs = *jobs;
    cfg.pie.jobs = *jobs;
  }
  if (!profile.empty()) cfg.profile = profile;

  try {
    if (search->parsed()) return cmd_search(cfg, out_dir.empty() ? cfg.output_dir : out_dir, io);
    if (estimate->parsed()) return cmd_estimate(cfg, network, csv, io);
    if (calib->parsed()) {
      const CalibrationProfile ref = resolve_profile(cfg.profile);
      copt.nonlinear_from = &ref;
      return cmd_calibrate(copt, profile_out, io);
    }
  } catch (const ConfigError& e) {
    report_error(std::cerr, "validation", e.field(), e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(std::cerr, "internal", "", e.what());
    return 1;
  }
  return kExitOk;
}
