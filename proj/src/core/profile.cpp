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

#include "sinfer/core/profile.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sinfer {

using ojson = nlohmann::ordered_json;

const LinearUnitCost* CalibrationProfile::find(std::uint64_t n, int w) const {
  const auto it = linear.find({n, w});
  return it == linear.end() ? nullptr : &it->second;
}

const NonLinearUnitCost* CalibrationProfile::find(NonLinearKind kind) const {
  const auto it = nonlinear.find(kind);
  return it == nonlinear.end() ? nullptr : &it->second;
}

std::vector<std::string> check_profile(const CalibrationProfile& profile) {
  std::vector<std::string> out;
  auto key = [](std::uint64_t n, int w) {
    return "n" + std::to_string(n) + "_w" + std::to_string(w);
  };
  if (profile.limb_bits < 1) out.push_back("limb_bits must be positive");
  for (const auto& [k, c] : profile.linear) {
    if (!(c.t_mult > 0) || !(c.t_rot > 0) || !(c.t_add > 0) || !(c.ct_bytes > 0)) {
      out.push_back(key(k.first, k.second) + ": entries must be > 0");
    }
  }
  for (const auto& [kind, c] : profile.nonlinear) {
    // AvgPool is absorbed into PAHE additions and may be priced at zero.
    if (kind == NonLinearKind::AvgPool) {
      if (c.t_per_element < 0 || c.b_per_element < 0) {
        out.push_back("AvgPool: entries must be >= 0");
      }
    } else if (!(c.t_per_element > 0) || !(c.b_per_element > 0)) {
      out.push_back(std::string(to_string(kind)) + ": entries must be > 0");
    }
    if (c.ref_bits < 1) out.push_back(std::string(to_string(kind)) + ": ref_bits must be >= 1");
  }
  auto monotone = [&](const LinearUnitCost& lo, const LinearUnitCost& hi, const std::string& what) {
    if (hi.t_mult < lo.t_mult) out.push_back(what + ": t_mult decreases");
    if (hi.t_rot < lo.t_rot) out.push_back(what + ": t_rot decreases");
    if (hi.t_add < lo.t_add) out.push_back(what + ": t_add decreases");
    if (hi.ct_bytes < lo.ct_bytes) out.push_back(what + ": ct_bytes decreases");
  };
  for (const auto& [k, c] : profile.linear) {
    // successor in n with the same words, successor in words with the same n
    for (const auto& [k2, c2] : profile.linear) {
      if (k2.second == k.second && k2.first > k.first) {
        bool next = true;
        for (const auto& [k3, c3] : profile.linear) {
          if (k3.second == k.second && k3.first > k.first && k3.first < k2.first) next = false;
        }
        if (next) monotone(c, c2, key(k.first, k.second) + " -> " + key(k2.first, k2.second));
      }
      if (k2.first == k.first && k2.second == k.second + 1) {
        monotone(c, c2, key(k.first, k.second) + " -> " + key(k2.first, k2.second));
      }
    }
  }
  return out;
}

std::string profile_to_json(const CalibrationProfile& profile) {
  ojson j;
  j["profile_name"] = profile.profile_name;
  j["source"] = profile.source == CalibrationProfile::Source::Measured ? "measured" : "reference";
  j["limb_bits"] = profile.limb_bits;
  ojson lin = ojson::object();
  for (const auto& [k, c] : profile.linear) {
    lin["n" + std::to_string(k.first) + "_w" + std::to_string(k.second)] = {
        {"t_mult", c.t_mult}, {"t_rot", c.t_rot}, {"t_add", c.t_add}, {"ct_bytes", c.ct_bytes}};
  }
  j["linear"] = lin;
  ojson nl = ojson::object();
  for (const auto& [kind, c] : profile.nonlinear) {
    nl[std::string(to_string(kind))] = {{"t_per_element", c.t_per_element},
                                        {"b_per_element", c.b_per_element},
                                        {"ref_bits", c.ref_bits}};
  }
  j["nonlinear"] = nl;
  return j.dump(2) + "\n";
}

CalibrationProfile profile_from_json(const std::string& text) {
  const auto j = ojson::parse(text);
  CalibrationProfile p;
  p.profile_name = j.at("profile_name").get<std::string>();
  const auto src = j.at("source").get<std::string>();
  if (src == "measured") {
    p.source = CalibrationProfile::Source::Measured;
  } else if (src == "reference") {
    p.source = CalibrationProfile::Source::Reference;
  } else {
    throw std::runtime_error("profile: unknown source \"" + src + "\"");
  }
  p.limb_bits = j.value("limb_bits", 62);
  for (auto it = j.at("linear").begin(); it != j.at("linear").end(); ++it) {
    std::uint64_t n = 0;
    int w = 0;
    if (std::sscanf(it.key().c_str(), "n%lu_w%d", &n, &w) != 2) {
      throw std::runtime_error("profile: bad row key \"" + it.key() + "\"");
    }
    const auto& v = it.value();
    p.linear[{n, w}] = {v.at("t_mult").get<double>(), v.at("t_rot").get<double>(),
                        v.at("t_add").get<double>(), v.at("ct_bytes").get<double>()};
  }
  for (auto it = j.at("nonlinear").begin(); it != j.at("nonlinear").end(); ++it) {
    NonLinearKind kind;
    if (it.key() == "ReLU") {
      kind = NonLinearKind::ReLU;
    } else if (it.key() == "Square") {
      kind = NonLinearKind::Square;
    } else if (it.key() == "AvgPool") {
      kind = NonLinearKind::AvgPool;
    } else {
      throw std::runtime_error("profile: unknown non-linear kind \"" + it.key() + "\"");
    }
    const auto& v = it.value();
    p.nonlinear[kind] = {v.at("t_per_element").get<double>(), v.at("b_per_element").get<double>(),
                         v.value("ref_bits", 1)};
  }
  return p;
}

CalibrationProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

void save_profile(const CalibrationProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile " + path);
  out << profile_to_json(profile);
}

}  // namespace sinfer
