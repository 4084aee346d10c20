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

// The 8-trial session: per-trial configuration, the control tick loop,
// switch detection, scoring and outcome classification.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consensus_lab/behavior.hpp"
#include "consensus_lab/bias_control.hpp"
#include "consensus_lab/observer.hpp"
#include "consensus_lab/opinion_core.hpp"
#include "consensus_lab/synthetic_human.hpp"

namespace consensus_lab::protocol {

using bias::ConsensusOption;

inline constexpr int kTrialsPerSession = 8;
inline constexpr int kMinTotalScore = -8;
inline constexpr int kMaxTotalScore = 16;

enum class Mode { Dissensus, BiasConsensus };
enum class Outcome { C, CH, D, DH };

std::string_view to_string(Mode m);
std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

struct ScoringRules {
  int match = 1;
  int mismatch = -1;
  int clicker_target = 10;
  int clicker_hit = 1;
  int clicker_miss = -1;
  int violation = -1;
};

struct TrialConfig {
  int index = 1;
  Mode mode = Mode::Dissensus;
  std::optional<ConsensusOption> option;
  human::GazeCue gaze;
  std::optional<ConsensusOption> lead_in;
  double countdown = 1.0;  // s
  ScoringRules rules;
};

// Rows 1..8 of the session schedule. Throws ArgumentError otherwise.
TrialConfig trial_config(int index);

std::vector<TrialConfig> default_schedule();

// Eye servo range: |yaw|, |pitch| <= pi/2. Throws ConfigError.
void validate_gaze(const human::GazeCue& cue);

// Eight rows with indices 1..8 in order and valid gaze angles.
void validate_schedule(const std::vector<TrialConfig>& schedule);

// Everything a trial loop needs beyond its TrialConfig.
struct SimulationParams {
  opinion::AgentParams robot;
  opinion::Adjacency adjacency;
  bias::BiasGains gains;
  observer::ObserverParams observer;
  observer::Workspace workspace;
  int c_max = 3;
  double arm_speed = 300.0;         // px/s
  double dt = 0.01;                 // s, 100 Hz
  double trial_cap = 15.0;          // s
  double switch_persistence = 0.1;  // s
  human::GazeMultipliers gaze_multipliers = human::kDefaultGazeMultipliers;

  // Throws ConfigError on any invalid component.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  Vec2 human;
  double z_hat = 0.0;
  double z_robot = 0.0;
  double b_robot = 0.0;
  Vec2 arm;
  behavior::Action action = behavior::Action::Stopped;
};

enum class EndReason { HumanPress, Cap, Inactivity, Aborted, Error };
std::string_view to_string(EndReason r);
EndReason end_reason_from_string(std::string_view s);

struct TrialRecord {
  TrialConfig config;
  std::vector<Sample> samples;
  std::optional<ConsensusOption> human_press;
  ConsensusOption robot_press = ConsensusOption::Red;
  int human_switch_count = 0;
  bool switched_after_commit = false;
  std::optional<double> commit_crossing_t;
  std::optional<int> clicker;
  int score_delta = 0;
  Outcome outcome = Outcome::D;
  bool violation = false;
  EndReason end_reason = EndReason::HumanPress;
  double duration = 0.0;
  std::string error;
  // Last time the bias loop was active (z_r * zhat_h <= 0); -1 if never.
  double last_bias_update_t = -1.0;
};

struct SwitchInfo {
  int count = 0;
  bool after_commit = false;
};

struct TimedValue {
  double t = 0.0;
  double value = 0.0;
};

// A switch is a sign change of zhat_h held for at least `persistence`
// seconds. Switches starting at or after commit_crossing_t set after_commit.
SwitchInfo detect_switch(const std::vector<TimedValue>& z_hat,
                         std::optional<double> commit_crossing_t, double persistence = 0.1);

// First sample time at which the human is above the commit line.
std::optional<double> commit_crossing_time(const std::vector<Sample>& samples, double line_y);

struct Classification {
  Outcome outcome = Outcome::D;
  bool violation = false;
};

// Throws StateError if the human never pressed.
int score_trial(const TrialRecord& r);
Classification classify_outcome(const TrialRecord& r);

// Tick-driven single trial; shared by batch runs and the live service.
class TrialRunner {
 public:
  TrialRunner(TrialConfig config, SimulationParams sim);

  // One control tick with the human at p. No-op once finished.
  void tick(Vec2 human_pos);

  // Forces the end of the trial; both sides commit to their nearest buzzer
  // (a human already pressing keeps that press).
  void force_stop(EndReason reason);

  bool finished() const { return finished_; }
  double time() const { return t_; }
  int ticks() const { return ticks_; }
  const behavior::ArmState& arm() const { return arm_; }
  double z_robot() const { return state_.z_robot; }
  double b_robot() const { return state_.b_robot; }
  const TrialConfig& config() const { return config_; }
  const SimulationParams& sim() const { return sim_; }
  Vec2 last_human() const { return last_human_; }

  // Completes and returns the record (scores, switches, outcome).
  TrialRecord finish(std::optional<int> clicker = std::nullopt);

 private:
  void end(std::optional<ConsensusOption> human_press, EndReason reason);

  TrialConfig config_;
  SimulationParams sim_;
  observer::Observer observer_;
  behavior::Debouncer debouncer_;
  behavior::ArmState arm_;
  opinion::OpinionState state_;
  std::vector<Sample> samples_;
  std::optional<ConsensusOption> human_press_;
  ConsensusOption robot_press_ = ConsensusOption::Red;
  EndReason reason_ = EndReason::HumanPress;
  double last_bias_update_t_ = -1.0;
  Vec2 last_human_;
  double t_ = 0.0;
  int ticks_ = 0;
  bool finished_ = false;
};

human::TrialContext make_context(const TrialConfig& config, const SimulationParams& sim);

// Runs one trial against a synthetic human until press or cap.
TrialRecord run_trial(const TrialConfig& config, const SimulationParams& sim,
                      human::HumanAgent& human);

struct SessionRecord {
  int participant_id = 0;
  std::vector<TrialRecord> trials;
  int total_score = 0;  // clamped to [-8, 16]
  bool aborted = false;
};

int session_total(const std::vector<TrialRecord>& trials);

using AgentFactory =
    std::function<std::unique_ptr<human::HumanAgent>(int participant, std::uint64_t seed)>;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t participant_seed(std::uint64_t seed, int participant);

SessionRecord run_participant(const AgentFactory& factory, int participant, std::uint64_t seed,
                              const SimulationParams& sim,
                              const std::vector<TrialConfig>& schedule = default_schedule());

// Participants in parallel; results ordered by participant index.
std::vector<SessionRecord> run_session(const AgentFactory& factory, int n, std::uint64_t seed,
                                       const SimulationParams& sim,
                                       const std::vector<TrialConfig>& schedule = default_schedule());
std::vector<SessionRecord> run_session_serial(
    const AgentFactory& factory, int n, std::uint64_t seed, const SimulationParams& sim,
    const std::vector<TrialConfig>& schedule = default_schedule());

}  // namespace consensus_lab::protocol
