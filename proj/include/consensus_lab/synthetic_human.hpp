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

// Human-side behavior for batch runs: scripted trajectories and a model human
// whose opinion follows the same dynamics as the robot, biased by gaze.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "consensus_lab/bias_control.hpp"
#include "consensus_lab/geometry.hpp"
#include "consensus_lab/observer.hpp"
#include "consensus_lab/opinion_core.hpp"

namespace consensus_lab::human {

using bias::ConsensusOption;

enum class GazeLevel { Neutral, Minimal, Low, Moderate, Significant, Extreme };
std::string_view to_string(GazeLevel l);

struct GazeCue {
  GazeLevel level = GazeLevel::Neutral;
  ConsensusOption target = ConsensusOption::Red;
  double yaw = 0.0;    // rad
  double pitch = 0.0;  // rad
};

// Bias multiplier per level, Neutral through Extreme.
using GazeMultipliers = std::array<double, 6>;
inline constexpr GazeMultipliers kDefaultGazeMultipliers{0.0, 0.9, 1.1, 1.5, 2.0, 2.5};

// b_h = s m(level) u with s = +1 for Red, -1 for Blue.
double gaze_to_bias(const GazeCue& cue, double attention,
                    const GazeMultipliers& m = kDefaultGazeMultipliers);

// Throws ConfigError unless the multipliers start at 0 and strictly increase.
void validate_multipliers(const GazeMultipliers& m);

enum class ScriptKind { Direct, MidSwitch, MultiSwitch, EarlyStrategicSwitch };
std::string_view to_string(ScriptKind k);
ScriptKind script_kind_from_string(std::string_view s);

struct HumanScript {
  ScriptKind kind = ScriptKind::Direct;
  ConsensusOption initial_target = ConsensusOption::Red;
  std::vector<double> switch_times;  // s after go
  double speed = 250.0;              // px/s
  double reaction_delay = 0.05;      // s, applied at go and after every switch

  // Strictly increasing non-negative switch times, positive speed.
  void validate() const;
};

// Default switch times per kind: none, {1.2}, {0.6, 1.2, 1.8}, {0.2}.
HumanScript make_script(ScriptKind kind, ConsensusOption initial, double speed = 250.0,
                        double reaction_delay = 0.05);

// Piecewise-linear path from ws.human_start toward the current target anchor,
// flipping target at each switch time (plus the delay). Stops at the anchor.
Vec2 scripted_position(const HumanScript& script, double t, const observer::Workspace& ws);

enum class Perception { FullState, SignOnly };

struct ModelHuman {
  opinion::AgentParams params;
  int edge = 1;  // a_hr
  double z_h = 0.0;
  double b_h = 0.0;
  Perception perception = Perception::SignOnly;
};

// One RK4 step of the human opinion with the robot seen as robot_visible
// (SignOnly replaces it with sign(robot_visible)).
ModelHuman model_human_step(const ModelHuman& h, double robot_visible, double dt);

// Step toward the red anchor for z_h > 0, blue for z_h < 0, length
// speed dt min(1, |z_h| / z_sat), never past the anchor.
Vec2 opinion_to_motion(double z_h, Vec2 current, const observer::Workspace& ws, double speed,
                       double dt, double z_sat);

// What a human agent gets to see of one trial.
struct TrialContext {
  int index = 1;
  GazeCue gaze;
  std::optional<ConsensusOption> lead_in;  // attention grab before the cue
  observer::Workspace ws;
  double robot_attention = 2.24;
  GazeMultipliers gaze_multipliers = kDefaultGazeMultipliers;
};

struct RobotView {
  double z_robot = 0.0;
  Vec2 arm_pos;
};

class HumanAgent {
 public:
  virtual ~HumanAgent() = default;
  virtual void begin_trial(const TrialContext& ctx) = 0;
  virtual Vec2 position() const = 0;
  // Moves the agent from time t to t + dt (seconds after go).
  virtual void advance(double t, double dt, const RobotView& robot) = 0;
  virtual std::string kind() const = 0;
};

// Follows a fixed script each trial. With follow_cue set, trials with a gaze
// cue start toward the cued option.
class ScriptedHuman : public HumanAgent {
 public:
  ScriptedHuman(HumanScript script, bool follow_cue);
  void begin_trial(const TrialContext& ctx) override;
  Vec2 position() const override { return pos_; }
  void advance(double t, double dt, const RobotView& robot) override;
  std::string kind() const override;
  const HumanScript& active_script() const { return active_; }

 private:
  HumanScript script_;
  HumanScript active_;
  bool follow_cue_;
  observer::Workspace ws_;
  Vec2 pos_;
};

// Population spread of the model human.
struct CohortParams {
  opinion::AgentParams params;
  Perception perception = Perception::SignOnly;
  double susceptibility_min = 0.95;  // scales the gaze bias per participant
  double susceptibility_max = 1.5;
  double delay_min = 0.2;  // s holding the predisposition before reacting
  double delay_max = 0.5;
  double predisposition_min = 0.15;  // |z_h| at go
  double predisposition_max = 0.4;
  double speed_min = 200.0;
  double speed_max = 300.0;
  double motion_saturation = 0.05;  // |z_h| giving full speed
  double lead_in_follow = 0.9;      // P(predisposed toward the lead-in gesture)
  double cue_follow = 0.8;          // P(predisposed toward the cued option)

  void validate() const;
};

// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);

class ModelHumanAgent : public HumanAgent {
 public:
  ModelHumanAgent(CohortParams cohort, std::uint64_t seed);
  // Fixed susceptibility instead of a draw.
  ModelHumanAgent(CohortParams cohort, std::uint64_t seed, double susceptibility);

  void begin_trial(const TrialContext& ctx) override;
  Vec2 position() const override { return pos_; }
  void advance(double t, double dt, const RobotView& robot) override;
  std::string kind() const override { return "model"; }

  double susceptibility() const { return susceptibility_; }
  double speed() const { return speed_; }
  const ModelHuman& state() const { return h_; }
  double reaction_delay() const { return delay_; }

 private:
  CohortParams cohort_;
  std::mt19937_64 rng_;
  double susceptibility_;
  double speed_;
  observer::Workspace ws_;
  ModelHuman h_;
  double delay_ = 0.0;
  Vec2 pos_;
};

}  // namespace consensus_lab::human
