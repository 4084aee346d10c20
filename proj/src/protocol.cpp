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

#include "consensus_lab/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::protocol {
namespace {

using human::GazeCue;
using human::GazeLevel;

constexpr double kTimeEps = 1e-9;

}  // namespace

std::string_view to_string(Mode m) {
  return m == Mode::Dissensus ? "dissensus" : "bias_consensus";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::C: return "C";
    case Outcome::CH: return "CH";
    case Outcome::D: return "D";
    case Outcome::DH: return "DH";
  }
  return "?";
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "C") return Outcome::C;
  if (s == "CH") return Outcome::CH;
  if (s == "D") return Outcome::D;
  if (s == "DH") return Outcome::DH;
  throw ArgumentError("unknown outcome '" + std::string(s) + "'");
}

std::string_view to_string(EndReason r) {
  switch (r) {
    case EndReason::HumanPress: return "human_press";
    case EndReason::Cap: return "cap";
    case EndReason::Inactivity: return "inactivity";
    case EndReason::Aborted: return "aborted";
    case EndReason::Error: return "error";
  }
  return "?";
}

EndReason end_reason_from_string(std::string_view s) {
  if (s == "human_press") return EndReason::HumanPress;
  if (s == "cap") return EndReason::Cap;
  if (s == "inactivity") return EndReason::Inactivity;
  if (s == "aborted") return EndReason::Aborted;
  if (s == "error") return EndReason::Error;
  throw ArgumentError("unknown end reason '" + std::string(s) + "'");
}

TrialConfig trial_config(int index) {
  if (index < 1 || index > kTrialsPerSession) {
    throw ArgumentError("trial index must be in 1..8, got " + std::to_string(index));
  }
  TrialConfig c;
  c.index = index;
  if (index <= 3) {
    c.mode = Mode::Dissensus;
    c.gaze = GazeCue{GazeLevel::Neutral, ConsensusOption::Red, 0.0, 0.0};
    return c;
  }
  c.mode = Mode::BiasConsensus;
  switch (index) {
    case 4:
      c.gaze = {GazeLevel::Minimal, ConsensusOption::Blue, -0.47, 0.31};
      c.lead_in = ConsensusOption::Red;
      break;
    case 5: c.gaze = {GazeLevel::Low, ConsensusOption::Red, 0.53, -0.53}; break;
    case 6: c.gaze = {GazeLevel::Moderate, ConsensusOption::Red, 0.62, -0.62}; break;
    case 7: c.gaze = {GazeLevel::Significant, ConsensusOption::Blue, -0.72, 0.72}; break;
    case 8: c.gaze = {GazeLevel::Extreme, ConsensusOption::Red, 1.09, -0.94}; break;
  }
  c.option = c.gaze.target;
  return c;
}

std::vector<TrialConfig> default_schedule() {
  std::vector<TrialConfig> out;
  for (int i = 1; i <= kTrialsPerSession; ++i) out.push_back(trial_config(i));
  return out;
}

void validate_gaze(const human::GazeCue& cue) {
  constexpr double kHalfPi = 1.5707963267948966;
  if (!(std::abs(cue.yaw) <= kHalfPi) || !(std::abs(cue.pitch) <= kHalfPi)) {
    throw ConfigError("gaze angles must lie within the eye servo range [-pi/2, pi/2]");
  }
}

void validate_schedule(const std::vector<TrialConfig>& schedule) {
  if (schedule.size() != static_cast<std::size_t>(kTrialsPerSession)) {
    throw ConfigError("a session has exactly 8 trials");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const TrialConfig& c = schedule[i];
    if (c.index != static_cast<int>(i) + 1) throw ConfigError("trial indices must run 1..8");
    validate_gaze(c.gaze);
    if (!(c.countdown >= 0.0)) throw ConfigError("countdown must be non-negative");
    if (c.mode == Mode::BiasConsensus && !c.option) {
      throw ConfigError("bias-consensus trial " + std::to_string(c.index) + " needs an option");
    }
  }
}

void SimulationParams::validate() const {
  robot.validate();
  adjacency.validate();
  gains.validate(robot);
  observer.validate();
  workspace.validate();
  human::validate_multipliers(gaze_multipliers);
  if (c_max < 1) throw ConfigError("behavior.c_max must be at least 1");
  if (!(arm_speed > 0.0)) throw ConfigError("behavior.arm_speed must be positive");
  if (!(dt > 0.0) || dt > 0.1) throw ConfigError("protocol.dt must be in (0, 0.1]");
  if (!(trial_cap > dt)) throw ConfigError("protocol.trial_cap must exceed dt");
  if (!(switch_persistence >= 0.0)) throw ConfigError("protocol.switch_persistence must be >= 0");
}

SwitchInfo detect_switch(const std::vector<TimedValue>& z_hat,
                         std::optional<double> commit_crossing_t, double persistence) {
  SwitchInfo info;
  int established = 0;
  int candidate = 0;
  double candidate_t = 0.0;
  for (const TimedValue& v : z_hat) {
    const int s = bias::sgn(v.value);
    if (s == 0) continue;
    if (established == 0) {
      established = s;
      continue;
    }
    if (s == established) {
      candidate = 0;
      continue;
    }
    if (candidate != s) {
      candidate = s;
      candidate_t = v.t;
    }
    if (v.t - candidate_t >= persistence - kTimeEps) {
      ++info.count;
      if (commit_crossing_t && candidate_t >= *commit_crossing_t) info.after_commit = true;
      established = s;
      candidate = 0;
    }
  }
  return info;
}

std::optional<double> commit_crossing_time(const std::vector<Sample>& samples, double line_y) {
  for (const Sample& s : samples) {
    if (s.human.y < line_y) return s.t;
  }
  return std::nullopt;
}

int score_trial(const TrialRecord& r) {
  if (!r.human_press) throw StateError("score_trial: record has no human press");
  const ScoringRules& k = r.config.rules;
  int score = *r.human_press == r.robot_press ? k.match : k.mismatch;
  if (r.clicker) score += *r.clicker == k.clicker_target ? k.clicker_hit : k.clicker_miss;
  if (r.switched_after_commit || r.human_switch_count > 1) score += k.violation;
  return score;
}

Classification classify_outcome(const TrialRecord& r) {
  const bool match = r.human_press && *r.human_press == r.robot_press;
  Classification c;
  if (r.human_switch_count == 0) {
    c.outcome = match ? Outcome::C : Outcome::D;
  } else {
    c.outcome = match ? Outcome::CH : Outcome::DH;
  }
  c.violation = r.human_switch_count > 1;
  return c;
}

TrialRunner::TrialRunner(TrialConfig config, SimulationParams sim)
    : config_(std::move(config)),
      sim_(std::move(sim)),
      observer_(sim_.workspace, sim_.observer) {
  sim_.validate();
  if (config_.mode == Mode::Dissensus) {
    opinion::validate_dissensus(sim_.robot, sim_.adjacency);
  } else if (!config_.option) {
    throw ConfigError("bias-consensus trial needs a consensus option");
  }
  debouncer_.c_max = sim_.c_max;
  arm_ = behavior::make_arm(sim_.workspace, sim_.arm_speed);
  last_human_ = sim_.workspace.human_start;
  samples_.reserve(static_cast<std::size_t>(sim_.trial_cap / sim_.dt) + 2);
}

void TrialRunner::tick(Vec2 human_pos) {
  if (finished_) return;
  const observer::Workspace& ws = sim_.workspace;
  last_human_ = human_pos;
  const observer::ObservationFrame frame = observer_.observe(t_, human_pos);
  samples_.push_back(
      Sample{t_, human_pos, frame.z_hat, state_.z_robot, state_.b_robot, arm_.pos, arm_.action});

  if (auto press = behavior::detect_press(human_pos, ws)) {
    end(press, EndReason::HumanPress);
    return;
  }

  const int a_rh = sim_.adjacency.robot_hears_human;
  if (config_.mode == Mode::Dissensus) {
    state_.z_robot =
        opinion::step_agent(state_.z_robot, frame.z_hat, sim_.robot, a_rh, 0.0, sim_.dt);
  } else {
    const bias::ConsensusStep r = bias::consensus_step(state_, *config_.option, sim_.gains,
                                                       sim_.robot, a_rh, frame.z_hat, sim_.dt);
    if (!r.bias_frozen) last_bias_update_t_ = t_;
    state_ = r.state;
  }

  if (arm_.action != behavior::Action::Pressed) {
    const int s = bias::sgn(state_.z_robot);
    if (s != 0) {
      const behavior::DebounceResult d = behavior::update_debouncer(debouncer_, s);
      debouncer_ = d.next;
      arm_ = behavior::decide_action(arm_, d.pivot, debouncer_.committed());
    }
    arm_ = behavior::advance_arm(arm_, sim_.dt, ws);
  }

  ++ticks_;
  t_ = ticks_ * sim_.dt;
  if (t_ >= sim_.trial_cap - kTimeEps) force_stop(EndReason::Cap);
}

void TrialRunner::force_stop(EndReason reason) {
  if (finished_) return;
  const observer::Workspace& ws = sim_.workspace;
  auto press = behavior::detect_press(last_human_, ws);
  end(press ? press : behavior::commit_nearest(last_human_, ws), reason);
}

void TrialRunner::end(std::optional<ConsensusOption> human_press, EndReason reason) {
  human_press_ = human_press;
  robot_press_ = arm_.pressed.value_or(behavior::commit_nearest(arm_.pos, sim_.workspace));
  reason_ = reason;
  finished_ = true;
}

TrialRecord TrialRunner::finish(std::optional<int> clicker) {
  if (!finished_) throw StateError("finish: trial still running");
  TrialRecord r;
  r.config = config_;
  r.samples = samples_;
  r.human_press = human_press_;
  r.robot_press = robot_press_;
  r.end_reason = reason_;
  r.duration = t_;
  r.clicker = clicker;
  r.last_bias_update_t = last_bias_update_t_;
  r.commit_crossing_t = commit_crossing_time(r.samples, sim_.workspace.commit_line_y);
  std::vector<TimedValue> z;
  z.reserve(r.samples.size());
  for (const Sample& s : r.samples) z.push_back({s.t, s.z_hat});
  const SwitchInfo sw = detect_switch(z, r.commit_crossing_t, sim_.switch_persistence);
  r.human_switch_count = sw.count;
  r.switched_after_commit = sw.after_commit;
  const Classification c = classify_outcome(r);
  r.outcome = c.outcome;
  r.violation = c.violation;
  r.score_delta = score_trial(r);
  return r;
}

human::TrialContext make_context(const TrialConfig& config, const SimulationParams& sim) {
  human::TrialContext ctx;
  ctx.index = config.index;
  ctx.gaze = config.gaze;
  ctx.lead_in = config.lead_in;
  ctx.ws = sim.workspace;
  ctx.robot_attention = sim.robot.attention;
  ctx.gaze_multipliers = sim.gaze_multipliers;
  return ctx;
}

TrialRecord run_trial(const TrialConfig& config, const SimulationParams& sim,
                      human::HumanAgent& human) {
  TrialRunner runner(config, sim);
  std::string error;
  try {
    human.begin_trial(make_context(config, sim));
    while (!runner.finished()) {
      const double t = runner.time();
      runner.tick(human.position());
      if (runner.finished()) break;
      human.advance(t, sim.dt, human::RobotView{runner.z_robot(), runner.arm().pos});
    }
  } catch (const std::exception& e) {
    error = e.what();
    runner.force_stop(EndReason::Error);
  }
  TrialRecord r = runner.finish();
  r.error = error;
  return r;
}

int session_total(const std::vector<TrialRecord>& trials) {
  int total = 0;
  for (const TrialRecord& r : trials) total += r.score_delta;
  return std::clamp(total, kMinTotalScore, kMaxTotalScore);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t participant_seed(std::uint64_t seed, int participant) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(participant));
}

SessionRecord run_participant(const AgentFactory& factory, int participant, std::uint64_t seed,
                              const SimulationParams& sim,
                              const std::vector<TrialConfig>& schedule) {
  validate_schedule(schedule);
  SessionRecord s;
  s.participant_id = participant;
  std::unique_ptr<human::HumanAgent> agent = factory(participant, participant_seed(seed, participant));
  if (!agent) throw ArgumentError("agent factory returned no agent");
  s.trials.reserve(kTrialsPerSession);
  for (const TrialConfig& c : schedule) s.trials.push_back(run_trial(c, sim, *agent));
  s.total_score = session_total(s.trials);
  return s;
}

std::vector<SessionRecord> run_session_serial(const AgentFactory& factory, int n,
                                              std::uint64_t seed, const SimulationParams& sim,
                                              const std::vector<TrialConfig>& schedule) {
  if (n < 1) throw ArgumentError("run_session: need at least one participant");
  std::vector<SessionRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(run_participant(factory, i, seed, sim, schedule));
  return out;
}

std::vector<SessionRecord> run_session(const AgentFactory& factory, int n, std::uint64_t seed,
                                       const SimulationParams& sim,
                                       const std::vector<TrialConfig>& schedule) {
  if (n < 1) throw ArgumentError("run_session: need at least one participant");
  std::vector<SessionRecord> out(static_cast<std::size_t>(n));
  std::exception_ptr failure;
  std::mutex failure_mu;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_participant(factory, i, seed, sim, schedule);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace consensus_lab::protocol
