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

#include "sinfer/controller/search.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace sinfer {

std::vector<std::string> SearchSettings::check() const {
  std::vector<std::string> v;
  if (episodes < 0) v.emplace_back("N: must be >= 0");
  if (sw_period < 1) v.emplace_back("SW_N: must be >= 1");
  if (batch < 1) v.emplace_back("m: must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) v.emplace_back("lr: must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) v.emplace_back("gamma: must be in (0, 1]");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) v.emplace_back("ema_decay: must be in [0, 1)");
  if (!(xi_max >= 0.0) || !std::isfinite(xi_max)) v.emplace_back("xi_max: must be >= 0");
  if (!known_dataset(dataset)) v.push_back("dataset: unknown tag \"" + dataset + "\"");
  if (jobs < 1) v.emplace_back("jobs: must be >= 1");
  return v;
}

std::string_view to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Ok: return "ok";
    case EpisodeStatus::Rejected: return "rejected";
    case EpisodeStatus::Infeasible: return "infeasible";
    case EpisodeStatus::EstimatorFailed: return "estimator_error";
  }
  return "?";
}

namespace {

struct CostOutcome {
  std::optional<CostReport> report;
  std::string error;
};

CostOutcome characterize(const SearchContext& ctx, const NetworkParms& net) {
  try {
    return {characterize_network(net, ctx.pie, ctx.profile, ctx.weights, ctx.memo), {}};
  } catch (const InfeasibleError& e) {
    return {std::nullopt, e.what()};
  }
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Objectives> objectives_of(const std::vector<const Episode*>& eps) {
  std::vector<Objectives> out;
  out.reserve(eps.size());
  for (const Episode* e : eps) out.push_back({e->A, e->T, e->B});
  return out;
}

}  // namespace

SearchResult run_search(const SearchContext& ctx) {
  const auto& s = ctx.settings;
  if (const auto v = ctx.space.check(); !v.empty()) throw std::invalid_argument(v.front());
  if (const auto v = s.check(); !v.empty()) throw std::invalid_argument(v.front());

  PieMemo local_memo;
  SearchContext run = ctx;
  if (run.memo == nullptr) run.memo = &local_memo;

  const auto decisions = ctx.space.decisions();
  SearchResult result;
  result.policy = PolicyState::uniform(ctx.space);
  PolicyState& policy = result.policy;
  policy.learning_rate = s.learning_rate;
  policy.gamma = s.gamma;
  policy.ema_decay = s.ema_decay;
  policy.batch = s.batch;

  Rng rng = make_rng(derive_seed(s.seed, 0));
  std::vector<int> train_actions;          // latest training episode
  std::optional<std::string> train_weights;  // its weights handle, if any

  for (std::int64_t start = 0; start < s.episodes; start += static_cast<std::int64_t>(s.batch)) {
    const std::int64_t stop = std::min(s.episodes, start + static_cast<std::int64_t>(s.batch));
    std::vector<Episode> batch;

    for (std::int64_t eps = start; eps < stop; ++eps) {
      Episode e;
      e.index = eps;
      e.sw_flag = sw_flag_for(eps, s.sw_period);
      std::vector<int> forced(decisions.size(), -1);
      e.copied.assign(decisions.size(), false);
      if (!e.sw_flag) {
        for (std::size_t k = 0; k < decisions.size(); ++k) {
          if (decisions[k].architectural()) {
            forced[k] = train_actions[k];
            e.copied[k] = true;
          }
        }
      }
      e.actions = sample(policy, rng, forced).actions;
      if (e.sw_flag) train_actions = e.actions;
      auto decoded = decode(e.actions, ctx.space, eps, s.sw_period);
      if (auto* rej = std::get_if<Rejection>(&decoded)) {
        e.status = EpisodeStatus::Rejected;
        e.detail = rej->reason;
      } else {
        e.net = std::move(std::get<NetworkParms>(decoded));
      }
      batch.push_back(std::move(e));
    }

    // Accuracy requests must run in episode order: a training episode's
    // handle feeds the reuse episodes after it.
    std::vector<CostOutcome> costs(batch.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].net) todo.push_back(i);
    }
    std::jthread cost_worker;
    std::exception_ptr cost_failure;
    auto cost_all = [&] {
      try {
        parallel_for(todo.size(), s.jobs,
                     [&](std::size_t j) { costs[todo[j]] = characterize(run, *batch[todo[j]].net); });
      } catch (...) {
        cost_failure = std::current_exception();
      }
    };
    if (s.jobs > 1) cost_worker = std::jthread(cost_all);

    std::vector<std::optional<AccuracyResponse>> acc(batch.size());
    std::vector<std::string> acc_error(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Episode& e = batch[i];
      if (!e.net) {
        if (e.sw_flag) train_weights.reset();
        continue;
      }
      AccuracyRequest req{*e.net, s.dataset, e.sw_flag ? std::nullopt : train_weights};
      if (!e.sw_flag && !train_weights) {
        acc_error[i] = "no trained weights to reuse";
        continue;
      }
      try {
        acc[i] = ctx.estimator.estimate(req);
        if (e.sw_flag) train_weights = acc[i]->weights_id;
      } catch (const EstimatorError& err) {
        acc_error[i] = err.what();
        if (e.sw_flag) train_weights.reset();
      }
    }
    if (s.jobs > 1) {
      cost_worker.join();
    } else {
      cost_all();
    }
    if (cost_failure) std::rethrow_exception(cost_failure);

    std::vector<Trajectory> traj;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Episode& e = batch[i];
      if (e.net) {
        if (acc[i]) {
          e.A = acc[i]->A;
          e.weights_id = acc[i]->weights_id;
        }
        if (costs[i].report) {
          e.T = costs[i].report->T;
          e.B = costs[i].report->B;
          e.xi = costs[i].report->xi;
          e.cost = std::move(costs[i].report);
        }
        if (!acc[i]) {
          e.status = EpisodeStatus::EstimatorFailed;
          e.detail = acc_error[i];
        } else if (!e.cost) {
          e.status = EpisodeStatus::Infeasible;
          e.detail = costs[i].error;
        } else {
          e.R = reward(e.A, shape_xi(e.xi, s.xi_max, s.raw_xi));
        }
      }
      traj.push_back({e.actions, e.copied, e.R});
    }
    update(policy, traj);
    for (Episode& e : batch) {
      if (ctx.on_episode) ctx.on_episode(e);
      result.episodes.push_back(std::move(e));
    }
  }

  std::vector<const Episode*> ok;
  std::vector<std::size_t> ok_index;
  std::map<std::tuple<std::vector<int>, double, double, double>, bool> seen;
  for (std::size_t i = 0; i < result.episodes.size(); ++i) {
    const Episode& e = result.episodes[i];
    if (e.status != EpisodeStatus::Ok) continue;
    if (!seen.emplace(std::make_tuple(e.actions, e.A, e.T, e.B), true).second) continue;
    ok.push_back(&e);
    ok_index.push_back(i);
  }
  const auto pts = objectives_of(ok);
  for (const std::size_t j : pareto_front(pts)) result.pareto.push_back(ok_index[j]);
  return result;
}

std::vector<double> reward_ema(const std::vector<Episode>& episodes, double decay) {
  std::vector<double> out;
  out.reserve(episodes.size());
  for (const Episode& e : episodes) {
    out.push_back(out.empty() ? e.R : decay * out.back() + (1.0 - decay) * e.R);
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_actions(const std::vector<int>& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(a[i]);
  }
  return s;
}

}  // namespace

std::string trace_csv_header() { return "Eps,actions,A,T,B,xi,R,sw_flag,status\n"; }

std::string trace_csv_row(const Episode& e) {
  const bool has_a = e.net && (e.status == EpisodeStatus::Ok || e.status == EpisodeStatus::Infeasible);
  const bool has_cost = e.cost.has_value();
  std::string row = std::to_string(e.index) + "," + join_actions(e.actions) + ",";
  row += (has_a ? fmt(e.A) : "") + ",";
  row += (has_cost ? fmt(e.T) : "") + ",";
  row += (has_cost ? fmt(e.B) : "") + ",";
  row += (has_cost ? fmt(e.xi) : "") + ",";
  row += fmt(e.R) + ",";
  row += (e.sw_flag ? "1" : "0");
  row += ",";
  row += to_string(e.status);
  row += "\n";
  return row;
}

namespace {

[[noreturn]] void bad_trace(std::size_t line, const std::string& column, const std::string& what) {
  throw std::runtime_error("trace line " + std::to_string(line) + ", column " + column + ": " + what);
}

double number(const std::string& cell, std::size_t line, const char* column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    bad_trace(line, column, "not a number");
  }
  if (used != cell.size()) bad_trace(line, column, "not a number");
  return v;
}

std::optional<double> optional_number(const std::string& cell, std::size_t line, const char* column) {
  if (cell.empty()) return std::nullopt;
  return number(cell, line, column);
}

}  // namespace

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const std::string header = trace_csv_header().substr(0, trace_csv_header().size() - 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != header) bad_trace(1, "header", "expected \"" + header + "\"");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) bad_trace(lineno, "*", "expected 9 fields, got " + std::to_string(cells.size()));
    TraceRow r;
    r.eps = static_cast<std::int64_t>(number(cells[0], lineno, "Eps"));
    r.actions = cells[1];
    r.A = optional_number(cells[2], lineno, "A");
    r.T = optional_number(cells[3], lineno, "T");
    r.B = optional_number(cells[4], lineno, "B");
    r.xi = optional_number(cells[5], lineno, "xi");
    r.R = number(cells[6], lineno, "R");
    if (cells[7] != "0" && cells[7] != "1") bad_trace(lineno, "sw_flag", "must be 0 or 1");
    r.sw_flag = cells[7] == "1";
    r.status = cells[8];
    r.line = line;
    rows.push_back(std::move(r));
  }
  if (lineno == 0) bad_trace(1, "header", "empty trace");
  return rows;
}

std::vector<std::size_t> pareto_rows(const std::vector<TraceRow>& rows) {
  std::vector<Objectives> pts;
  std::vector<std::size_t> index;
  std::map<std::tuple<std::string, double, double, double>, bool> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& r = rows[i];
    if (r.status != "ok" || !r.A || !r.T || !r.B) continue;
    if (!seen.emplace(std::make_tuple(r.actions, *r.A, *r.T, *r.B), true).second) continue;
    pts.push_back({*r.A, *r.T, *r.B});
    index.push_back(i);
  }
  std::vector<std::size_t> out;
  for (const std::size_t j : pareto_front(pts)) out.push_back(index[j]);
  return out;
}

}  // namespace sinfer
