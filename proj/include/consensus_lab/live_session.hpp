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

// One live participant session as a pure state machine. The network layer
// feeds it client messages in arrival order and one tick() per control
// period; everything it emits is returned as wire messages.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "consensus_lab/protocol.hpp"
#include "consensus_lab/wire.hpp"

namespace consensus_lab::service {

enum class Phase { Lobby, Countdown, Running, Done };
std::string_view to_string(Phase p);

struct SessionOptions {
  protocol::SimulationParams sim;
  std::vector<protocol::TrialConfig> schedule = protocol::default_schedule();
  double inactivity_timeout = 10.0;  // s without client messages while Running
};

// Stores a finished or aborted session; throws on storage failure.
using Persister = std::function<void(const protocol::SessionRecord&)>;

using Messages = std::vector<nlohmann::json>;

class LiveSession {
 public:
  LiveSession(int id, SessionOptions options, Persister persist = {});

  // Malformed text yields Error{parse}; never throws.
  Messages handle_text(std::string_view text);
  Messages handle(const wire::ClientMessage& m);

  // One control period.
  Messages tick();

  // Disconnect or shutdown. Flushes a partial log flagged aborted. Idempotent.
  Messages abort();

  int id() const { return id_; }
  Phase phase() const { return phase_; }
  int trial_index() const;  // 1-based, current or next trial
  const std::string& name() const { return name_; }
  const protocol::SessionRecord& record() const { return record_; }
  bool persisted() const { return persisted_; }

 private:
  Messages on(const wire::Hello& m);
  Messages on(const wire::Ready& m);
  Messages on(const wire::Cursor& m);
  Messages on(const wire::ClickerCount& m);
  Messages on(const wire::Quit& m);

  void close_trial(Messages& out);
  void finish_session(Messages& out);
  int running_score() const;

  int id_;
  SessionOptions opt_;
  Persister persist_;
  protocol::SessionRecord record_;
  Phase phase_ = Phase::Lobby;
  std::string name_;
  std::optional<protocol::TrialRunner> runner_;
  Vec2 cursor_;
  std::optional<double> cursor_t_;
  std::optional<int> clicker_;
  int countdown_ticks_ = 0;
  int idle_ticks_ = 0;
  int idle_limit_ = 0;
  bool persisted_ = false;
};

}  // namespace consensus_lab::service
