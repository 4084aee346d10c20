// Copyright 2026 The Consensus Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP + websocket host for live sessions: `/session` upgrades to a
// LiveSession ticked at the control rate, `/healthz` returns build info,
// anything else is served from an optional static directory.

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"

#include "consensus_lab/live_session.hpp"

namespace consensus_lab::service {

struct ServerOptions {
  std::string address = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  int max_sessions = 16;
  std::filesystem::path data_dir = "data";
  std::filesystem::path static_dir;  // empty: no static files
  SessionOptions session;
};

nlohmann::json build_info();

// One past the highest session_NNNN stem already in dir (1 if none).
int next_session_id(const std::filesystem::path& dir);

class Server {
 public:
  // Binds immediately; throws std::system_error when the port is taken.
  explicit Server(ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const;

  // Serves until stop() or SIGINT/SIGTERM if handle_signals is set.
  void run(bool handle_signals = false);

  // Thread-safe. Aborts live sessions, flushing their logs, then drains.
  void stop();

  int live_sessions() const;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace consensus_lab::service
