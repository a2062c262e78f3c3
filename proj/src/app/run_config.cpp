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

#include "sinfer/app/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sinfer {

using json = nlohmann::json;

RunConfig default_run_config() {
  RunConfig c;
  c.space.slots = {SlotKind::CR, SlotKind::PL, SlotKind::CR, SlotKind::FC};
  SlotChoices conv{{4, 8, 16}, {{3, 3}, {5, 5}}, {4, 6, 8}, {4, 6, 8}};
  SlotChoices fc{{}, {}, {4, 6, 8}, {4, 6, 8}};
  c.space.choices = {conv, {}, conv, fc};
  c.space.input_side = 16;
  c.space.input_channels = 1;
  c.space.classes = 10;
  c.pie.mc_trials = 300;
  c.pie.delta = 1e-2;
  c.weights = {0.5, 1.0, 1e7};
  return c;
}

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(field(it.key()), "unknown field");
    }
  }

  const json* find(const char* key) const {
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <typename T>
  void integer(const char* key, T& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "must be an integer");
      out = v->get<T>();
    }
  }

  void number(const char* key, double& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        throw ConfigError(field(key), "must be a finite number");
      }
      out = v->get<double>();
    }
  }

  void boolean(const char* key, bool& out) const {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) const {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  void int_list(const char* key, std::vector<std::int64_t>& out) const {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "must be an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number_integer()) {
          throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "must be an integer");
        }
        out.push_back((*v)[i].get<std::int64_t>());
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
};

SlotChoices parse_choices(const json& j, const std::string& path, SlotChoices base) {
  Reader r(j, path);
  r.allow({"filters", "kernels", "l_i", "l_f"});
  r.int_list("filters", base.filters);
  r.int_list("l_i", base.input_bits);
  r.int_list("l_f", base.weight_bits);
  if (const json* k = r.find("kernels")) {
    const std::string f = r.field("kernels");
    if (!k->is_array()) throw ConfigError(f, "must be an array of [f_h, f_w] pairs");
    base.kernels.clear();
    for (std::size_t i = 0; i < k->size(); ++i) {
      const json& pair = (*k)[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer()) {
        throw ConfigError(f + "[" + std::to_string(i) + "]", "must be an [f_h, f_w] integer pair");
      }
      base.kernels.emplace_back(pair[0].get<std::int64_t>(), pair[1].get<std::int64_t>());
    }
  }
  return base;
}

std::string resolve(const std::string& p, const std::string& base_dir) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

// Checkers report "field: message" or "field message ...".
void require_empty(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  const std::string& first = problems.front();
  const auto colon = first.find(':');
  if (colon != std::string::npos && first.find(' ') > colon) {
    throw ConfigError(first.substr(0, colon), first.substr(colon + 2));
  }
  const auto space = first.find(' ');
  throw ConfigError(first.substr(0, space), first);
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  RunConfig c = default_run_config();
  Reader r(doc, "");
  r.allow({"template", "input", "classes", "choices", "N", "SW_N", "m", "lr", "gamma",
           "ema_decay", "xi_max", "raw_xi", "seed", "dataset", "jobs", "beta", "time_scale",
           "bw_scale", "delta", "lambda", "mc_trials", "n_candidates", "q_bit_step",
           "literal_mod_n", "noise", "bit_bounds", "security_table", "profile", "trainer", "output_dir"});

  if (const json* t = r.find("template")) {
    if (!t->is_array()) throw ConfigError("template", "must be an array of \"CR\", \"PL\", \"FC\"");
    c.space.slots.clear();
    for (std::size_t i = 0; i < t->size(); ++i) {
      const json& s = (*t)[i];
      const std::string f = "template[" + std::to_string(i) + "]";
      if (!s.is_string()) throw ConfigError(f, "must be a string");
      const auto v = s.get<std::string>();
      if (v == "CR") {
        c.space.slots.push_back(SlotKind::CR);
      } else if (v == "PL") {
        c.space.slots.push_back(SlotKind::PL);
      } else if (v == "FC") {
        c.space.slots.push_back(SlotKind::FC);
      } else {
        throw ConfigError(f, "unknown slot \"" + v + "\"");
      }
    }
  }
  // choices: one object shared by every slot, or one object per slot.
  const SlotChoices shared = default_run_config().space.choices.front();
  c.space.choices.assign(c.space.slots.size(), shared);
  if (const json* ch = r.find("choices")) {
    if (ch->is_object()) {
      const SlotChoices one = parse_choices(*ch, "choices", shared);
      c.space.choices.assign(c.space.slots.size(), one);
    } else if (ch->is_array()) {
      if (ch->size() != c.space.slots.size()) {
        throw ConfigError("choices", "expected " + std::to_string(c.space.slots.size()) +
                                         " entries (one per template slot)");
      }
      for (std::size_t i = 0; i < ch->size(); ++i) {
        c.space.choices[i] = parse_choices((*ch)[i], "choices[" + std::to_string(i) + "]", shared);
      }
    } else {
      throw ConfigError("choices", "must be an object or an array of objects");
    }
  }
  if (const json* in = r.find("input")) {
    Reader ir(*in, "input");
    ir.allow({"side", "channels"});
    ir.integer("side", c.space.input_side);
    ir.integer("channels", c.space.input_channels);
  }
  r.integer("classes", c.space.classes);

  if (const json* bb = r.find("bit_bounds")) {
    Reader br(*bb, "bit_bounds");
    br.allow({"min", "max"});
    br.integer("min", c.space.bounds.min_bits);
    br.integer("max", c.space.bounds.max_bits);
    if (c.space.bounds.min_bits < 1 || c.space.bounds.max_bits < c.space.bounds.min_bits) {
      throw ConfigError("bit_bounds", "need 1 <= min <= max");
    }
  }
  r.integer("N", c.search.episodes);
  r.integer("SW_N", c.search.sw_period);
  r.integer("m", c.search.batch);
  r.number("lr", c.search.learning_rate);
  r.number("gamma", c.search.gamma);
  r.number("ema_decay", c.search.ema_decay);
  r.number("xi_max", c.search.xi_max);
  r.boolean("raw_xi", c.search.raw_xi);
  r.integer("seed", c.search.seed);
  r.string("dataset", c.search.dataset);
  r.integer("jobs", c.search.jobs);

  r.number("beta", c.weights.beta);
  r.number("time_scale", c.weights.time_scale);
  r.number("bw_scale", c.weights.bw_scale);

  r.number("delta", c.pie.delta);
  r.integer("lambda", c.pie.lambda);
  r.integer("mc_trials", c.pie.mc_trials);
  if (const json* nc = r.find("n_candidates")) {
    if (!nc->is_array()) throw ConfigError("n_candidates", "must be an array of integers");
    c.pie.n_candidates.clear();
    for (std::size_t i = 0; i < nc->size(); ++i) {
      if (!(*nc)[i].is_number_unsigned()) {
        throw ConfigError("n_candidates[" + std::to_string(i) + "]", "must be a positive integer");
      }
      c.pie.n_candidates.push_back((*nc)[i].get<std::uint64_t>());
    }
  }
  r.integer("q_bit_step", c.pie.q_bit_step);
  r.boolean("literal_mod_n", c.pie.literal_mod_n);
  if (const json* nz = r.find("noise")) {
    Reader nr(*nz, "noise");
    nr.allow({"sigma", "ks_enabled", "ks_digits", "ks_factor"});
    nr.number("sigma", c.pie.noise.sigma);
    nr.boolean("ks_enabled", c.pie.noise.ks_enabled);
    nr.integer("ks_digits", c.pie.noise.ks_digits);
    nr.number("ks_factor", c.pie.noise.ks_factor);
  }
  c.pie.seed = c.search.seed;
  c.pie.jobs = c.search.jobs;
  std::string table;
  r.string("security_table", table);
  if (!table.empty()) {
    try {
      c.pie.table = load_security_table(resolve(table, base_dir));
    } catch (const std::exception& e) {
      throw ConfigError("security_table", e.what());
    }
  }
  r.string("profile", c.profile);
  if (c.profile != "reference") c.profile = resolve(c.profile, base_dir);
  r.string("output_dir", c.output_dir);

  if (const json* tr = r.find("trainer")) {
    if (!tr->is_null()) {
      Reader tw(*tr, "trainer");
      tw.allow({"command", "startup_timeout_ms", "request_timeout_ms"});
      TrainerOptions opt;
      const json* cmd = tw.find("command");
      if (cmd == nullptr || !cmd->is_array() || cmd->empty()) {
        throw ConfigError("trainer.command", "must be a non-empty array of strings");
      }
      for (std::size_t i = 0; i < cmd->size(); ++i) {
        if (!(*cmd)[i].is_string()) {
          throw ConfigError("trainer.command[" + std::to_string(i) + "]", "must be a string");
        }
        opt.command.push_back((*cmd)[i].get<std::string>());
      }
      std::int64_t startup = opt.startup_timeout.count();
      std::int64_t request = opt.request_timeout.count();
      tw.integer("startup_timeout_ms", startup);
      tw.integer("request_timeout_ms", request);
      if (startup < 1) throw ConfigError("trainer.startup_timeout_ms", "must be >= 1");
      if (request < 1) throw ConfigError("trainer.request_timeout_ms", "must be >= 1");
      opt.startup_timeout = std::chrono::milliseconds(startup);
      opt.request_timeout = std::chrono::milliseconds(request);
      c.trainer = std::move(opt);
    }
  }

  require_empty(c.space.check());
  require_empty(c.search.check());
  require_empty(c.weights.check());
  require_empty(c.pie.check());
  if (c.search.dataset != "surrogate" && !c.trainer) {
    throw ConfigError("trainer", "dataset \"" + c.search.dataset + "\" needs a trainer command");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_run_config(ss.str(), parent.empty() ? "." : parent.string());
}

}  // namespace sinfer
