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

#include "consensus_lab/behavior.hpp"

#include <algorithm>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::behavior {
namespace {

Action toward(int sign) { return sign > 0 ? Action::TowardRed : Action::TowardBlue; }

constexpr double kTimeEps = 1e-9;

}  // namespace

DebounceResult update_debouncer(const Debouncer& d, int s) {
  if (s != 1 && s != -1) throw ArgumentError("update_debouncer: sign must be +1 or -1");
  DebounceResult r{d, false, false};
  Debouncer& n = r.next;
  if (d.prev_sign == 0) {
    n.prev_sign = s;
    r.seeded = true;
    return r;
  }
  const int committed = d.committed();
  n.transition = {false, false, false};
  if (s == committed) {
    n.change_count = 0;
  } else {
    n.change_count = d.change_count + 1;
    if (n.change_count >= n.c_max) {
      r.pivot = true;
      n.change_count = 0;
    } else {
      n.transition[std::min(n.change_count, 3) - 1] = true;
    }
  }
  n.prev_sign = s;
  return r;
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Stopped: return "stopped";
    case Action::TowardRed: return "toward_red";
    case Action::TowardBlue: return "toward_blue";
    case Action::Paused: return "paused";
    case Action::Pressed: return "pressed";
  }
  return "unknown";
}

ArmState make_arm(const observer::Workspace& ws, double speed) {
  if (!(speed > 0.0)) throw ConfigError("arm speed must be positive");
  ArmState a;
  a.pos = ws.robot_home;
  a.speed = speed;
  return a;
}

ArmState decide_action(const ArmState& arm, bool pivot, int target_sign) {
  if (arm.action == Action::Pressed) throw StateError("decide_action: arm already pressed");
  if (target_sign != 1 && target_sign != -1) {
    throw ArgumentError("decide_action: target sign must be +1 or -1");
  }
  ArmState n = arm;
  if (arm.action == Action::Stopped) {
    n.action = toward(target_sign);
    return n;
  }
  if (!pivot) return n;
  if (arm.action != Action::Paused) n.pause_remaining = kPauseSeconds;
  n.action = Action::Paused;
  n.pending_sign = target_sign;
  return n;
}

ArmState advance_arm(const ArmState& arm, double dt, const observer::Workspace& ws) {
  if (!(dt > 0.0)) throw ArgumentError("advance_arm: dt must be positive");
  ArmState n = arm;
  switch (arm.action) {
    case Action::Pressed:
    case Action::Stopped:
      return n;
    case Action::Paused:
      n.pause_remaining = arm.pause_remaining - dt;
      if (n.pause_remaining <= kTimeEps) {
        n.pause_remaining = 0.0;
        n.action = toward(arm.pending_sign);
        n.pending_sign = 0;
      }
      return n;
    case Action::TowardRed:
    case Action::TowardBlue: {
      const bool red = arm.action == Action::TowardRed;
      const Vec2 target = red ? ws.red_box.anchor() : ws.blue_box.anchor();
      const Vec2 delta = target - arm.pos;
      const double dist = delta.norm();
      const double step = arm.speed * dt;
      if (dist <= step * (1.0 + 1e-9)) {
        n.pos = target;
        n.action = Action::Pressed;
        n.pressed = red ? ConsensusOption::Red : ConsensusOption::Blue;
      } else {
        n.pos = arm.pos + (step / dist) * delta;
      }
      return n;
    }
  }
  return n;
}

std::optional<ConsensusOption> detect_press(Vec2 p, const observer::Workspace& ws) {
  if (ws.red_box.contains(p)) return ConsensusOption::Red;
  if (ws.blue_box.contains(p)) return ConsensusOption::Blue;
  return std::nullopt;
}

ConsensusOption commit_nearest(Vec2 arm_pos, const observer::Workspace& ws) {
  const double d_blue = distance(arm_pos, ws.blue_box.anchor());
  const double d_red = distance(arm_pos, ws.red_box.anchor());
  return d_blue < d_red ? ConsensusOption::Blue : ConsensusOption::Red;
}

}  // namespace consensus_lab::behavior
