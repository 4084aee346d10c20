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

// Robot action state machine: debounced direction changes, pause-then-pivot,
// press detection and the nearest-buzzer commit. The arm is a point moving in
// the workspace.

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "consensus_lab/bias_control.hpp"
#include "consensus_lab/geometry.hpp"
#include "consensus_lab/observer.hpp"

namespace consensus_lab::behavior {

using bias::ConsensusOption;

struct Debouncer {
  int prev_sign = 0;  // last observed sign(z_r); 0 before the first call
  int change_count = 0;
  std::array<bool, 3> transition{false, false, false};
  int c_max = 3;

  // Direction the arm is committed to.
  int committed() const { return change_count > 0 ? -prev_sign : prev_sign; }
};

struct DebounceResult {
  Debouncer next;
  bool pivot = false;
  bool seeded = false;  // first observation
};

// Throws ArgumentError for s not in {-1, +1}.
DebounceResult update_debouncer(const Debouncer& d, int s);

enum class Action { Stopped, TowardRed, TowardBlue, Paused, Pressed };
std::string_view to_string(Action a);

inline constexpr double kPauseSeconds = 0.1;

struct ArmState {
  Vec2 pos;
  double speed = 300.0;  // px/s
  Action action = Action::Stopped;
  double pause_remaining = 0.0;
  int pending_sign = 0;  // direction taken once the pause ends
  std::optional<ConsensusOption> pressed;
};

ArmState make_arm(const observer::Workspace& ws, double speed);

// Pivot: pause for 0.1 s, then head for target_sign. A pivot during a pause
// replaces the pending direction without extending the pause. A stopped arm
// starts straight toward target_sign. Throws StateError once pressed.
ArmState decide_action(const ArmState& arm, bool pivot, int target_sign);

// Constant-speed motion toward the current anchor; arriving within one step
// presses that buzzer. Throws ArgumentError for dt <= 0.
ArmState advance_arm(const ArmState& arm, double dt, const observer::Workspace& ws);

// Buzzer whose closed box contains p.
std::optional<ConsensusOption> detect_press(Vec2 p, const observer::Workspace& ws);

// Blue iff strictly nearer the blue anchor.
ConsensusOption commit_nearest(Vec2 arm_pos, const observer::Workspace& ws);

}  // namespace consensus_lab::behavior
