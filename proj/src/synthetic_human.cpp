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

#include "consensus_lab/synthetic_human.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::human {
namespace {

Vec2 anchor_of(ConsensusOption o, const observer::Workspace& ws) {
  return o == ConsensusOption::Red ? ws.red_box.anchor() : ws.blue_box.anchor();
}

ConsensusOption flip(ConsensusOption o) {
  return o == ConsensusOption::Red ? ConsensusOption::Blue : ConsensusOption::Red;
}

// Moves from p toward target by at most len.
Vec2 move_toward(Vec2 p, Vec2 target, double len) {
  const Vec2 delta = target - p;
  const double d = delta.norm();
  if (d <= len || d == 0.0) return target;
  return p + (len / d) * delta;
}

}  // namespace

std::string_view to_string(GazeLevel l) {
  switch (l) {
    case GazeLevel::Neutral: return "neutral";
    case GazeLevel::Minimal: return "minimal";
    case GazeLevel::Low: return "low";
    case GazeLevel::Moderate: return "moderate";
    case GazeLevel::Significant: return "significant";
    case GazeLevel::Extreme: return "extreme";
  }
  return "unknown";
}

double gaze_to_bias(const GazeCue& cue, double attention, const GazeMultipliers& m) {
  const double s = cue.target == ConsensusOption::Red ? 1.0 : -1.0;
  return s * m[static_cast<std::size_t>(cue.level)] * attention;
}

void validate_multipliers(const GazeMultipliers& m) {
  if (m[0] != 0.0) throw ConfigError("gaze multiplier for neutral must be 0");
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (!(m[i] > m[i - 1]) || !std::isfinite(m[i])) {
      throw ConfigError("gaze multipliers must strictly increase from neutral to extreme");
    }
  }
}

std::string_view to_string(ScriptKind k) {
  switch (k) {
    case ScriptKind::Direct: return "direct";
    case ScriptKind::MidSwitch: return "mid_switch";
    case ScriptKind::MultiSwitch: return "multi_switch";
    case ScriptKind::EarlyStrategicSwitch: return "early_switch";
  }
  return "unknown";
}

ScriptKind script_kind_from_string(std::string_view s) {
  if (s == "direct") return ScriptKind::Direct;
  if (s == "mid_switch") return ScriptKind::MidSwitch;
  if (s == "multi_switch") return ScriptKind::MultiSwitch;
  if (s == "early_switch") return ScriptKind::EarlyStrategicSwitch;
  throw ArgumentError("unknown script kind '" + std::string(s) + "'");
}

void HumanScript::validate() const {
  if (!(speed > 0.0) || !std::isfinite(speed)) throw ConfigError("script speed must be positive");
  if (!(reaction_delay >= 0.0)) throw ConfigError("script reaction delay must be non-negative");
  for (std::size_t i = 0; i < switch_times.size(); ++i) {
    if (!(switch_times[i] >= 0.0)) throw ConfigError("switch times must be non-negative");
    if (i > 0 && !(switch_times[i] > switch_times[i - 1])) {
      throw ConfigError("switch times must be strictly increasing");
    }
  }
}

HumanScript make_script(ScriptKind kind, ConsensusOption initial, double speed,
                        double reaction_delay) {
  HumanScript s;
  s.kind = kind;
  s.initial_target = initial;
  s.speed = speed;
  s.reaction_delay = reaction_delay;
  switch (kind) {
    case ScriptKind::Direct: break;
    case ScriptKind::MidSwitch: s.switch_times = {1.2}; break;
    case ScriptKind::MultiSwitch: s.switch_times = {0.6, 1.2, 1.8}; break;
    case ScriptKind::EarlyStrategicSwitch: s.switch_times = {0.2}; break;
  }
  return s;
}

Vec2 scripted_position(const HumanScript& script, double t, const observer::Workspace& ws) {
  Vec2 pos = ws.human_start;
  double t_cur = script.reaction_delay;
  if (t <= t_cur) return pos;
  ConsensusOption target = script.initial_target;
  for (double sw : script.switch_times) {
    const double t_flip = sw + script.reaction_delay;
    if (t_flip >= t) break;
    if (t_flip > t_cur) {
      pos = move_toward(pos, anchor_of(target, ws), script.speed * (t_flip - t_cur));
      t_cur = t_flip;
    }
    target = flip(target);
  }
  return move_toward(pos, anchor_of(target, ws), script.speed * (t - t_cur));
}

ModelHuman model_human_step(const ModelHuman& h, double robot_visible, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("model_human_step: dt must be positive");
  const double seen =
      h.perception == Perception::SignOnly ? static_cast<double>(bias::sgn(robot_visible))
                                           : robot_visible;
  ModelHuman n = h;
  n.z_h = opinion::step_agent(h.z_h, seen, h.params, h.edge, h.b_h, dt);
  return n;
}

Vec2 opinion_to_motion(double z_h, Vec2 current, const observer::Workspace& ws, double speed,
                       double dt, double z_sat) {
  if (z_h == 0.0) return current;
  const Vec2 target = z_h > 0.0 ? ws.red_box.anchor() : ws.blue_box.anchor();
  const double scale = std::min(1.0, std::abs(z_h) / z_sat);
  return move_toward(current, target, speed * dt * scale);
}

ScriptedHuman::ScriptedHuman(HumanScript script, bool follow_cue)
    : script_(std::move(script)), active_(script_), follow_cue_(follow_cue) {
  script_.validate();
}

void ScriptedHuman::begin_trial(const TrialContext& ctx) {
  ws_ = ctx.ws;
  active_ = script_;
  if (follow_cue_ && ctx.gaze.level != GazeLevel::Neutral) active_.initial_target = ctx.gaze.target;
  pos_ = ws_.human_start;
}

void ScriptedHuman::advance(double t, double dt, const RobotView&) {
  pos_ = scripted_position(active_, t + dt, ws_);
}

std::string ScriptedHuman::kind() const { return std::string(to_string(script_.kind)); }

void CohortParams::validate() const {
  params.validate();
  auto range = [](double lo, double hi, const char* what) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ConfigError(std::string("cohort ") + what + ": min must not exceed max");
    }
  };
  range(susceptibility_min, susceptibility_max, "susceptibility");
  range(delay_min, delay_max, "delay");
  range(predisposition_min, predisposition_max, "predisposition");
  range(speed_min, speed_max, "speed");
  if (!(susceptibility_min >= 0.0) || !(delay_min >= 0.0) || !(predisposition_min > 0.0) ||
      !(speed_min > 0.0) || !(motion_saturation > 0.0)) {
    throw ConfigError("cohort: ranges must be positive");
  }
  if (!(lead_in_follow >= 0.0 && lead_in_follow <= 1.0) ||
      !(cue_follow >= 0.0 && cue_follow <= 1.0)) {
    throw ConfigError("cohort: follow probabilities must lie in [0, 1]");
  }
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

ModelHumanAgent::ModelHumanAgent(CohortParams cohort, std::uint64_t seed)
    : cohort_(cohort), rng_(seed) {
  cohort_.validate();
  susceptibility_ = uniform(rng_, cohort_.susceptibility_min, cohort_.susceptibility_max);
  speed_ = uniform(rng_, cohort_.speed_min, cohort_.speed_max);
}

ModelHumanAgent::ModelHumanAgent(CohortParams cohort, std::uint64_t seed, double susceptibility)
    : ModelHumanAgent(cohort, seed) {
  susceptibility_ = susceptibility;
}

void ModelHumanAgent::begin_trial(const TrialContext& ctx) {
  ws_ = ctx.ws;
  pos_ = ws_.human_start;
  delay_ = uniform(rng_, cohort_.delay_min, cohort_.delay_max);
  const double magnitude =
      uniform(rng_, cohort_.predisposition_min, cohort_.predisposition_max);
  const double coin = unit_uniform(rng_);
  int sign = coin < 0.5 ? 1 : -1;
  if (ctx.lead_in) {
    sign = bias::target_sign(coin < cohort_.lead_in_follow ? *ctx.lead_in : flip(*ctx.lead_in));
  } else if (ctx.gaze.level != GazeLevel::Neutral) {
    sign = bias::target_sign(coin < cohort_.cue_follow ? ctx.gaze.target : flip(ctx.gaze.target));
  }
  h_ = ModelHuman{};
  h_.params = cohort_.params;
  h_.perception = cohort_.perception;
  h_.z_h = sign * magnitude;
  h_.b_h = susceptibility_ * gaze_to_bias(ctx.gaze, ctx.robot_attention, ctx.gaze_multipliers);
}

void ModelHumanAgent::advance(double t, double dt, const RobotView& robot) {
  if (t + dt > delay_) h_ = model_human_step(h_, robot.z_robot, dt);
  pos_ = opinion_to_motion(h_.z_h, pos_, ws_, speed_, dt, cohort_.motion_saturation);
}

}  // namespace consensus_lab::human
