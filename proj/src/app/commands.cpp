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

#include "sinfer/app/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace sinfer {

namespace fs = std::filesystem;

// The search bounds limit what the controller may emit; any network the
// cost model can price is accepted by `estimate`.
constexpr QuantizerBounds kEstimateBounds{1, 64};

void report_error(std::ostream& err, std::string_view kind, std::string_view field,
                  std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["field"] = field;
  j["message"] = message;
  err << j.dump() << "\n";
}

CalibrationProfile resolve_profile(const std::string& source) {
  if (source == "reference") return reference_profile();
  CalibrationProfile p = load_profile(source);
  if (const auto v = check_profile(p); !v.empty()) {
    throw ConfigError("profile", source + ": " + v.front());
  }
  return p;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

int cmd_search(const RunConfig& cfg, const std::string& out_dir, CommandIO io) {
  CalibrationProfile profile;
  try {
    profile = resolve_profile(cfg.profile);
  } catch (const std::exception& e) {
    report_error(io.err, "validation", "profile", e.what());
    return kExitValidation;
  }
  std::unique_ptr<AccuracyEstimator> estimator;
  if (cfg.trainer) {
    try {
      estimator = std::make_unique<TrainerClient>(*cfg.trainer);
    } catch (const EstimatorError& e) {
      report_error(io.err, "trainer", "trainer.command", e.what());
      return kExitTrainer;
    }
  } else {
    estimator = std::make_unique<SurrogateEstimator>(cfg.space.bounds);
  }

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream trace(dir / "trace.csv", std::ios::binary);
  if (!trace) {
    report_error(io.err, "io", "output_dir", "cannot write " + (dir / "trace.csv").string());
    return kExitValidation;
  }
  trace << trace_csv_header();
  trace.flush();

  PieMemo memo;
  const SearchContext ctx{cfg.space, cfg.search, cfg.pie, cfg.weights, profile, *estimator, &memo,
                          [&](const Episode& e) {
                            trace << trace_csv_row(e);
                            trace.flush();
                          }};
  SearchResult result;
  try {
    result = run_search(ctx);
  } catch (const std::invalid_argument& e) {
    report_error(io.err, "validation", "search", e.what());
    return kExitValidation;
  }
  trace.close();

  std::string pareto = trace_csv_header();
  for (const std::size_t i : result.pareto) pareto += trace_csv_row(result.episodes[i]);
  write_file(dir / "pareto.csv", pareto);

  const Episode* best = nullptr;
  std::size_t ok = 0;
  std::size_t estimator_failed = 0;
  for (const Episode& e : result.episodes) {
    if (e.status == EpisodeStatus::EstimatorFailed) ++estimator_failed;
    if (e.status != EpisodeStatus::Ok) continue;
    ++ok;
    if (best == nullptr || e.R > best->R) best = &e;
  }
  if (best != nullptr) write_file(dir / "best_network.json", serialize_network(*best->net));

  const auto ema = reward_ema(result.episodes, cfg.search.ema_decay);
  std::ostringstream series;
  series << std::setprecision(17) << "Eps,R,R_ema\n";
  for (std::size_t i = 0; i < result.episodes.size(); ++i) {
    series << result.episodes[i].index << "," << result.episodes[i].R << "," << ema[i] << "\n";
  }
  write_file(dir / "reward.csv", series.str());

  std::ostringstream sum;
  sum << std::setprecision(6);
  sum << "episodes: " << result.episodes.size() << "\n";
  sum << "ok: " << ok << "\n";
  sum << "pareto: " << result.pareto.size() << "\n";
  sum << "distinct linear layers priced: " << memo.size() << "\n";
  if (!ema.empty()) sum << "final reward EMA: " << ema.back() << "\n";
  if (best != nullptr) {
    sum << "best episode: " << best->index << " R=" << best->R << " A=" << best->A
        << " T=" << best->T << " s B=" << best->B << " bytes\n";
  }
  write_file(dir / "summary.txt", sum.str());
  io.out << sum.str();

  if (!result.episodes.empty() && estimator_failed == result.episodes.size()) {
    report_error(io.err, "trainer", "trainer", "every accuracy request failed");
    return kExitTrainer;
  }
  return kExitOk;
}

int cmd_estimate(const RunConfig& cfg, const std::string& network_path,
                 const std::string& csv_path, CommandIO io) {
  NetworkParms net;
  try {
    net = parse_network(read_file(network_path));
  } catch (const ParseError& e) {
    report_error(io.err, "validation", e.field(), e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(io.err, "validation", "network", e.what());
    return kExitValidation;
  }
  if (const auto v = validate_network(net, kEstimateBounds); !v.empty()) {
    for (const Violation& x : v) {
      report_error(io.err, "validation", "layers[" + std::to_string(x.layer) + "]", x.message);
    }
    return kExitValidation;
  }
  CalibrationProfile profile;
  try {
    profile = resolve_profile(cfg.profile);
  } catch (const std::exception& e) {
    report_error(io.err, "validation", "profile", e.what());
    return kExitValidation;
  }
  CostReport report;
  try {
    report = characterize_network(net, cfg.pie, profile, cfg.weights);
  } catch (const LayerInfeasibleError& e) {
    report_error(io.err, "infeasible", "layers[" + std::to_string(e.layer()) + "]",
                 std::string(to_string(e.binding())) + ": " + e.what());
    return kExitInfeasible;
  } catch (const MissingProfileEntry& e) {
    report_error(io.err, "validation", "profile", e.what());
    return kExitValidation;
  }
  io.out << cost_report_text(report);
  if (!csv_path.empty()) write_file(csv_path, cost_report_csv(report));
  return kExitOk;
}

int cmd_calibrate(const CalibrateOptions& opt, const std::string& out_path, CommandIO io) {
  CalibrationProfile p;
  try {
    p = calibrate(opt);
  } catch (const std::exception& e) {
    report_error(io.err, "validation", "calibrate", e.what());
    return kExitValidation;
  }
  save_profile(p, out_path);
  io.out << "wrote " << p.linear.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int cmd_pareto(const std::string& trace_path, const std::string& out_path, CommandIO io) {
  std::vector<TraceRow> rows;
  try {
    rows = parse_trace_csv(read_file(trace_path));
  } catch (const std::exception& e) {
    report_error(io.err, "validation", "trace", e.what());
    return kExitValidation;
  }
  std::string out = trace_csv_header();
  const auto front = pareto_rows(rows);
  for (const std::size_t i : front) out += rows[i].line + "\n";
  write_file(out_path, out);
  io.out << front.size() << " of " << rows.size() << " rows are non-dominated\n";
  return kExitOk;
}

}  // namespace sinfer
