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

#include "consensus_lab/live_session.hpp"

#include <cmath>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::service {

using nlohmann::json;

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Lobby: return "lobby";
    case Phase::Countdown: return "countdown";
    case Phase::Running: return "running";
    case Phase::Done: return "done";
  }
  return "?";
}

LiveSession::LiveSession(int id, SessionOptions options, Persister persist)
    : id_(id), opt_(std::move(options)), persist_(std::move(persist)) {
  opt_.sim.validate();
  protocol::validate_schedule(opt_.schedule);
  if (!(opt_.inactivity_timeout > 0.0)) throw ConfigError("inactivity timeout must be positive");
  record_.participant_id = id;
  cursor_ = opt_.sim.workspace.human_start;
  idle_limit_ = static_cast<int>(std::lround(opt_.inactivity_timeout / opt_.sim.dt));
}

int LiveSession::trial_index() const {
  return static_cast<int>(record_.trials.size()) + 1;
}

int LiveSession::running_score() const { return protocol::session_total(record_.trials); }

Messages LiveSession::handle_text(std::string_view text) {
  try {
    return handle(wire::parse_client(text));
  } catch (const wire::WireError& e) {
    return {wire::error(e.code(), e.what())};
  }
}

Messages LiveSession::handle(const wire::ClientMessage& m) {
  if (phase_ == Phase::Running) idle_ticks_ = 0;
  return std::visit([this](const auto& v) { return on(v); }, m);
}

Messages LiveSession::on(const wire::Hello& m) {
  if (phase_ != Phase::Lobby || !record_.trials.empty()) {
    return {wire::error(wire::kBadState, "Hello is only valid before the first trial")};
  }
  name_ = m.name;
  return {};
}

Messages LiveSession::on(const wire::Ready&) {
  if (phase_ != Phase::Lobby) {
    return {wire::error(wire::kBadState, "Ready is only valid between trials")};
  }
  const protocol::TrialConfig& c = opt_.schedule.at(record_.trials.size());
  cursor_ = opt_.sim.workspace.human_start;
  cursor_t_.reset();
  clicker_.reset();
  countdown_ticks_ = static_cast<int>(std::lround(c.countdown / opt_.sim.dt));
  phase_ = Phase::Countdown;
  Messages out{wire::trial_start(c)};
  if (countdown_ticks_ == 0) {
    runner_.emplace(c, opt_.sim);
    idle_ticks_ = 0;
    phase_ = Phase::Running;
  }
  return out;
}

Messages LiveSession::on(const wire::Cursor& m) {
  if (phase_ != Phase::Countdown && phase_ != Phase::Running) {
    return {wire::error(wire::kBadState, "Cursor outside a trial")};
  }
  // latest wins; stale frames are dropped
  if (cursor_t_ && m.t < *cursor_t_) return {};
  cursor_t_ = m.t;
  cursor_ = {m.x, m.y};
  return {};
}

Messages LiveSession::on(const wire::ClickerCount& m) {
  if (phase_ != Phase::Countdown && phase_ != Phase::Running) {
    return {wire::error(wire::kBadState, "ClickerCount outside a trial")};
  }
  clicker_ = m.n;
  return {};
}

Messages LiveSession::on(const wire::Quit&) {
  if (phase_ == Phase::Done) return {wire::error(wire::kBadState, "session already finished")};
  return abort();
}

Messages LiveSession::tick() {
  Messages out;
  if (phase_ == Phase::Countdown) {
    if (--countdown_ticks_ <= 0) {
      runner_.emplace(opt_.schedule.at(record_.trials.size()), opt_.sim);
      idle_ticks_ = 0;
      phase_ = Phase::Running;
    }
    return out;
  }
  if (phase_ != Phase::Running) return out;
  runner_->tick(cursor_);
  if (!runner_->finished() && ++idle_ticks_ >= idle_limit_) {
    runner_->force_stop(protocol::EndReason::Inactivity);
  }
  out.push_back(wire::tick(runner_->time(), runner_->arm().pos, runner_->arm().action, running_score()));
  if (runner_->finished()) close_trial(out);
  return out;
}

void LiveSession::close_trial(Messages& out) {
  record_.trials.push_back(runner_->finish(clicker_));
  runner_.reset();
  out.push_back(wire::trial_end(record_.trials.back()));
  if (record_.trials.size() == opt_.schedule.size()) {
    finish_session(out);
  } else {
    phase_ = Phase::Lobby;
  }
}

void LiveSession::finish_session(Messages& out) {
  phase_ = Phase::Done;
  record_.total_score = protocol::session_total(record_.trials);
  try {
    if (persist_) persist_(record_);
    persisted_ = true;
  } catch (const std::exception& e) {
    out.push_back(wire::error(wire::kStorage, e.what()));
    return;
  }
  out.push_back(wire::session_end(record_));
}

Messages LiveSession::abort() {
  Messages out;
  if (phase_ == Phase::Done) return out;
  if (runner_) {
    runner_->force_stop(protocol::EndReason::Aborted);
    record_.trials.push_back(runner_->finish(clicker_));
    runner_.reset();
    out.push_back(wire::trial_end(record_.trials.back()));
  }
  record_.aborted = true;
  if (record_.trials.empty()) {
    phase_ = Phase::Done;
    return out;
  }
  finish_session(out);
  return out;
}

}  // namespace consensus_lab::service
