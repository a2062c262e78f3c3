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

#ifndef SINFER_APP_RUN_CONFIG_HPP
#define SINFER_APP_RUN_CONFIG_HPP

// One JSON document configures every subcommand. All keys are optional and
// unknown keys are rejected; see configs/ and the README for the schema.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sinfer/controller/search.hpp"
#include "sinfer/estimator/trainer_client.hpp"
#include "sinfer/pce/cost.hpp"
#include "sinfer/pie/pie.hpp"

namespace sinfer {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  SearchSpace space;
  SearchSettings search;
  PieConfig pie;
  ScoreWeights weights;
  /// "reference" or a profile file path.
  std::string profile = "reference";
  std::optional<TrainerOptions> trainer;
  std::string output_dir = "sinfer-out";
};

/// Defaults: a CR-PL-CR-FC template on 16x16x1 inputs with small choice
/// lists, search-grade pie settings (300 trials, delta 1e-2).
RunConfig default_run_config();

/// Parses and validates; throws ConfigError naming the offending field.
/// Relative paths inside the document resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

}  // namespace sinfer

#endif  // SINFER_APP_RUN_CONFIG_HPP
