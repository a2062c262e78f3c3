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

#include "sinfer/estimator/trainer_client.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "json.hpp"

extern char** environ;

namespace sinfer {

using ojson = nlohmann::ordered_json;

std::string encode_request(const AccuracyRequest& request, std::int64_t id) {
  ojson msg;
  msg["id"] = id;
  msg["kind"] = request.net.sw_flag ? "train" : "eval";
  msg["net"] = ojson::parse(serialize_network(request.net));
  msg["dataset"] = request.dataset;
  if (request.weights_id) msg["weights_id"] = *request.weights_id;
  return msg.dump();
}

AccuracyResponse decode_response(const std::string& line, std::int64_t id, bool sw_flag) {
  ojson msg;
  try {
    msg = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("trainer sent malformed JSON: ") + e.what());
  }
  if (!msg.is_object()) throw ProtocolError("trainer message is not an object");
  const auto rid = msg.find("id");
  if (rid == msg.end() || !rid->is_number_integer()) {
    throw ProtocolError("trainer message has no integer id");
  }
  if (rid->get<std::int64_t>() != id) {
    throw ProtocolError("trainer answered id " + std::to_string(rid->get<std::int64_t>()) +
                        ", expected " + std::to_string(id));
  }
  const auto kind = msg.find("kind");
  if (kind == msg.end() || !kind->is_string()) throw ProtocolError("trainer message has no kind");
  if (*kind == "error") {
    const auto m = msg.find("message");
    throw TrainerFailure(m != msg.end() && m->is_string() ? m->get<std::string>()
                                                           : std::string("unspecified error"));
  }
  if (*kind != "result") {
    throw ProtocolError("unexpected message kind \"" + kind->get<std::string>() + "\"");
  }
  const auto a = msg.find("A");
  const auto w = msg.find("weights_id");
  const auto t = msg.find("trained");
  if (a == msg.end() || !a->is_number()) throw ProtocolError("result has no numeric A");
  if (w == msg.end() || !w->is_string()) throw ProtocolError("result has no weights_id");
  if (t == msg.end() || !t->is_boolean()) throw ProtocolError("result has no boolean trained");
  AccuracyResponse r{a->get<double>(), w->get<std::string>(), t->get<bool>()};
  if (!(r.A >= 0.0 && r.A <= 1.0)) throw ProtocolError("result A outside [0, 1]");
  if (r.trained != sw_flag) throw ProtocolError("result trained flag does not match sw_flag");
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() <= 0 ? 0 : static_cast<int>(std::min<long long>(left.count(), 1 << 30));
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

TrainerClient::TrainerClient(TrainerOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw std::invalid_argument("TrainerClient: empty command");
  spawn();
}

TrainerClient::~TrainerClient() { terminate(true); }

void TrainerClient::spawn() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw EstimatorError("pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw EstimatorError("pipe: " + std::string(std::strerror(errno)));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> argv;
  for (auto& s : options_.command) argv.push_back(s.data());
  argv.push_back(nullptr);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw ProtocolError("cannot start trainer \"" + options_.command.front() +
                        "\": " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();

  try {
    const std::string line = read_line(Clock::now() + options_.startup_timeout);
    ojson hello;
    try {
      hello = ojson::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError("trainer handshake is not JSON");
    }
    if (!hello.is_object() || hello.value("kind", "") != "ready") {
      throw ProtocolError("trainer handshake must be {\"kind\":\"ready\"}");
    }
    if (hello.value("protocol", -1) != kTrainerProtocolVersion) {
      throw ProtocolError("trainer speaks an unsupported protocol version");
    }
  } catch (...) {
    terminate(false);
    throw;
  }
}

void TrainerClient::terminate(bool graceful) {
  if (pid_ <= 0) return;
  if (graceful && to_child_ >= 0) {
    try {
      ojson bye{{"id", next_id_++}, {"kind", "shutdown"}};
      write_line(bye.dump(), Clock::now() + std::chrono::milliseconds(500));
    } catch (const EstimatorError&) {
      // The child is gone or wedged; it is killed below.
    }
  }
  close_fd(to_child_);
  close_fd(from_child_);
  int status = 0;
  const auto deadline = Clock::now() + std::chrono::milliseconds(graceful ? 2000 : 0);
  while (::waitpid(pid_, &status, WNOHANG) == 0) {
    if (Clock::now() >= deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  pid_ = -1;
}

void TrainerClient::write_line(const std::string& text, Clock::time_point deadline) {
  const std::string line = text + "\n";
  // Keep a dead reader from raising SIGPIPE; EPIPE is reported instead.
  sigset_t pipe_set;
  sigset_t old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
  std::size_t done = 0;
  int err = 0;
  while (done < line.size()) {
    pollfd pfd{to_child_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) {
      err = -1;
      break;
    }
    const ssize_t n = ::write(to_child_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      err = errno;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  if (err == EPIPE) {
    const timespec zero{0, 0};
    sigtimedwait(&pipe_set, nullptr, &zero);
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  if (err == -1) throw TrainerTimeout("timed out writing to trainer");
  if (err != 0) throw ProtocolError("trainer closed its input: " + std::string(std::strerror(err)));
}

std::string TrainerClient::read_line(Clock::time_point deadline) {
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) throw TrainerTimeout("trainer did not answer in time");
    if (ready < 0) throw ProtocolError("poll: " + std::string(std::strerror(errno)));
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw ProtocolError("trainer closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

AccuracyResponse TrainerClient::estimate(const AccuracyRequest& request) {
  const auto problems = request.check();
  if (!problems.empty()) throw ProtocolError(problems.front());
  if (pid_ <= 0) {
    spawn();
    ++restarts_;
  }
  const std::int64_t id = next_id_++;
  const auto deadline = Clock::now() + options_.request_timeout;
  try {
    write_line(encode_request(request, id), deadline);
    return decode_response(read_line(deadline), id, request.net.sw_flag);
  } catch (const TrainerFailure&) {
    throw;
  } catch (const EstimatorError&) {
    terminate(false);
    throw;
  }
}

}  // namespace sinfer
