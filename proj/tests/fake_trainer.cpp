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

// Scripted trainer for protocol tests. Answers with the surrogate accuracy
// and keeps an in-memory weight store keyed by handle.
//
//   fake_trainer [--mode ok|hang|garbage|wrong-id|error|die|silent|old-protocol]
//                [--delay-ms N]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "json.hpp"
#include "sinfer/estimator/estimator.hpp"

using json = nlohmann::json;

int main(int argc, char** argv) {
  std::string mode = "ok";
  int delay_ms = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--mode") mode = argv[i + 1];
    if (flag == "--delay-ms") delay_ms = std::atoi(argv[i + 1]);
  }
  if (mode == "silent") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  std::cout << json{{"kind", "ready"}, {"protocol", mode == "old-protocol" ? 0 : 1}}.dump()
            << std::endl;
  if (mode == "die") return 3;

  std::map<std::string, std::string> store;  // handle -> architecture fingerprint
  std::string line;
  while (std::getline(std::cin, line)) {
    const json req = json::parse(line);
    const auto id = req.at("id").get<std::int64_t>();
    const auto kind = req.at("kind").get<std::string>();
    if (kind == "shutdown") return 0;
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    if (mode == "hang") continue;
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    json out{{"id", mode == "wrong-id" ? id + 1 : id}};
    if (mode == "error") {
      out["kind"] = "error";
      out["message"] = "scripted failure";
      std::cout << out.dump() << std::endl;
      continue;
    }
    const auto net = sinfer::parse_network(req.at("net").dump());
    const std::string fp = sinfer::architecture_fingerprint(net);
    std::string handle;
    if (kind == "train") {
      handle = "w" + std::to_string(store.size() + 1);
      store[handle] = fp;
    } else {
      const auto w = req.find("weights_id");
      const auto it = w == req.end() ? store.end() : store.find(w->get<std::string>());
      if (it == store.end() || it->second != fp) {
        out["kind"] = "error";
        out["message"] = it == store.end() ? "unknown weights_id" : "architecture mismatch";
        std::cout << out.dump() << std::endl;
        continue;
      }
      handle = it->first;
    }
    out["kind"] = "result";
    out["A"] = sinfer::surrogate_accuracy(net);
    out["weights_id"] = handle;
    out["trained"] = kind == "train";
    std::cout << out.dump() << std::endl;
  }
  return 0;
}
