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

#include "consensus_lab/bias_control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/rk4.hpp"

namespace consensus_lab::bias {

int target_sign(ConsensusOption o) { return o == ConsensusOption::Red ? 1 : -1; }

std::string_view to_string(ConsensusOption o) { return o == ConsensusOption::Red ? "red" : "blue"; }

ConsensusOption option_from_string(std::string_view s) {
  if (s == "red" || s == "Red") return ConsensusOption::Red;
  if (s == "blue" || s == "Blue") return ConsensusOption::Blue;
  throw ArgumentError("unknown option '" + std::string(s) + "'");
}

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

void BiasGains::validate(const opinion::AgentParams& robot) const {
  if (!(sigma_mag >= 0.0) || !std::isfinite(sigma_mag)) {
    throw ConfigError("gains.sigma_mag must be non-negative");
  }
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("gains.K must be positive");
  if (!(b_star > 0.0) || !std::isfinite(b_star)) throw ConfigError("gains.b_star must be positive");
  if (b_star < robot.attention) {
    throw ConfigError("gains.b_star = " + std::to_string(b_star) +
                      " is below the robot attention u = " + std::to_string(robot.attention));
  }
  if (!(b_limit >= b_star)) throw ConfigError("gains.b_limit must be at least b_star");
}

double signed_sigma(ConsensusOption o, const BiasGains& g) {
  return o == ConsensusOption::Red ? -g.sigma_mag : g.sigma_mag;
}

double beta(ConsensusOption o, const BiasGains& g) { return -g.K * signed_sigma(o, g); }

double bias_rate(double b_r, double z_r, int sgn_zh, ConsensusOption o, const BiasGains& g) {
  const double s = signed_sigma(o, g);
  return s * z_r * sgn_zh + beta(o, g) * std::max(0.0, g.b_star - std::abs(b_r));
}

double bias_rate_factored_form(double b_r, double z_r, int sgn_zh, ConsensusOption o,
                               const BiasGains& g) {
  const double s = signed_sigma(o, g);
  return s * (z_r * sgn_zh - g.K * std::max(0.0, g.b_star - std::abs(b_r)));
}

ConsensusStep consensus_step(const opinion::OpinionState& state, ConsensusOption o,
                             const BiasGains& g, const opinion::AgentParams& p, int a_rh,
                             double observed_zh, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("consensus_step: dt must be positive");
  ConsensusStep out{state, false};
  if (state.z_robot * observed_zh > 0.0) {
    out.bias_frozen = true;
    out.state.z_robot = opinion::step_agent(state.z_robot, observed_zh, p, a_rh, state.b_robot, dt);
  } else {
    const int s = sgn(observed_zh);
    auto f = [&](const StateVec<2>& y) -> StateVec<2> {
      return {opinion::opinion_rate(y[0], observed_zh, p, a_rh, y[1]),
              bias_rate(y[1], y[0], s, o, g)};
    };
    const StateVec<2> next = rk4_step<2>({state.z_robot, state.b_robot}, dt, f);
    if (!std::isfinite(next[0]) || std::abs(next[0]) > opinion::kBlowupLimit) {
      throw NumericalError("consensus_step: robot opinion blew up");
    }
    out.state.z_robot = next[0];
    out.state.b_robot = std::clamp(next[1], -g.b_limit, g.b_limit);
  }
  out.state.t = state.t + dt;
  return out;
}

}  // namespace consensus_lab::bias
