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

#ifndef SINFER_APP_COMMANDS_HPP
#define SINFER_APP_COMMANDS_HPP

// Subcommand bodies shared by the `sinfer` executable and the tests. Each
// returns a process exit code and writes diagnostics to `err` as one JSON
// object per line: {"error": kind, "field": ..., "message": ...}.

#include <ostream>
#include <string>
#include <string_view>

#include "sinfer/app/run_config.hpp"

namespace sinfer {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitInfeasible = 3,
  kExitTrainer = 4,
};

struct CommandIO {
  std::ostream& out;
  std::ostream& err;
};

void report_error(std::ostream& err, std::string_view kind, std::string_view field,
                  std::string_view message);

/// "reference" or a profile file; the loaded profile must pass check_profile.
CalibrationProfile resolve_profile(const std::string& source);

/// Writes trace.csv (streamed per episode), pareto.csv, reward.csv
/// (Eps,R,R_ema), best_network.json and summary.txt into `out_dir`.
int cmd_search(const RunConfig& cfg, const std::string& out_dir, CommandIO io);

/// Prints the text report; writes the per-layer CSV to `csv_path` if set.
int cmd_estimate(const RunConfig& cfg, const std::string& network_path,
                 const std::string& csv_path, CommandIO io);

int cmd_calibrate(const CalibrateOptions& opt, const std::string& out_path, CommandIO io);

/// Reads a trace CSV and writes its non-dominated ok rows in trace schema.
int cmd_pareto(const std::string& trace_path, const std::string& out_path, CommandIO io);

}  // namespace sinfer

#endif  // SINFER_APP_COMMANDS_HPP
