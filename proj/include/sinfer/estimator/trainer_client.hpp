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

#ifndef SINFER_ESTIMATOR_TRAINER_CLIENT_HPP
#define SINFER_ESTIMATOR_TRAINER_CLIENT_HPP

// Client side of the trainer protocol: one child process, newline-delimited
// JSON in both directions over its standard streams.
//
//   trainer -> {"kind":"ready","protocol":1}                 once, at start
//   engine  -> {"id":k,"kind":"train"|"eval","net":{...},"dataset":"...",
//               "weights_id":"..."}                           eval only
//   trainer -> {"id":k,"kind":"result","A":a,"weights_id":"...","trained":b}
//            | {"id":k,"kind":"error","message":"..."}
//   engine  -> {"id":k,"kind":"shutdown"}                    on destruction
//
// One request is in flight at a time and ids increase strictly, so every
// response must echo the id of the request just sent.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "sinfer/estimator/estimator.hpp"

namespace sinfer {

struct TrainerOptions {
  /// argv of the trainer; argv[0] is resolved through PATH.
  std::vector<std::string> command;
  std::chrono::milliseconds startup_timeout{10000};
  std::chrono::milliseconds request_timeout{600000};
};

inline constexpr int kTrainerProtocolVersion = 1;

/// Request line for `request` under `id` (no trailing newline).
std::string encode_request(const AccuracyRequest& request, std::int64_t id);

/// Parses one response line for request `id`. Throws ProtocolError on any
/// contract violation and TrainerFailure on an "error" message.
AccuracyResponse decode_response(const std::string& line, std::int64_t id, bool sw_flag);

class TrainerClient final : public AccuracyEstimator {
 public:
  /// Spawns the trainer and waits for its ready line.
  explicit TrainerClient(TrainerOptions options);
  ~TrainerClient() override;
  TrainerClient(const TrainerClient&) = delete;
  TrainerClient& operator=(const TrainerClient&) = delete;

  /// A timeout or protocol error terminates the child; the next request
  /// starts a fresh one, which has lost every stored weights handle.
  AccuracyResponse estimate(const AccuracyRequest& request) override;

  bool running() const { return pid_ > 0; }
  std::int64_t restarts() const { return restarts_; }

 private:
  void spawn();
  void terminate(bool graceful);
  void write_line(const std::string& line, std::chrono::steady_clock::time_point deadline);
  std::string read_line(std::chrono::steady_clock::time_point deadline);

  TrainerOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 1;
  std::int64_t restarts_ = 0;
};

}  // namespace sinfer

#endif  // SINFER_ESTIMATOR_TRAINER_CLIENT_HPP
