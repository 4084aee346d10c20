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

// Dynamic robot bias driving the pair from dissensus to consensus.
//
//   b_r' = sigma z_r sgn(zhat_h) + beta max(0, b* - |b_r|),   beta = -K sigma

#pragma once

#include <string_view>

#include "consensus_lab/opinion_core.hpp"

namespace consensus_lab::bias {

enum class ConsensusOption { Red, Blue };

// +1 for Red, -1 for Blue.
int target_sign(ConsensusOption o);
std::string_view to_string(ConsensusOption o);
ConsensusOption option_from_string(std::string_view s);

struct BiasGains {
  double sigma_mag = 0.1;
  double K = 16.0;
  double b_star = 3.24;
  double b_limit = 6.0;  // |b_r| clamp

  // Throws ConfigError on non-positive gains or b_star below the robot's u.
  void validate(const opinion::AgentParams& robot) const;
};

double signed_sigma(ConsensusOption o, const BiasGains& g);

// beta = -K sigma.
double beta(ConsensusOption o, const BiasGains& g);

double bias_rate(double b_r, double z_r, int sgn_zh, ConsensusOption o, const BiasGains& g);

// sigma (z_r sgn - K max(0, b* - |b_r|)). Same value as bias_rate.
double bias_rate_factored_form(double b_r, double z_r, int sgn_zh, ConsensusOption o,
                               const BiasGains& g);

struct ConsensusStep {
  opinion::OpinionState state;
  bool bias_frozen = false;
};

// One tick of the robot side. While z_r * zhat_h <= 0, (z_r, b_r) are
// co-integrated; otherwise b_r is held and only z_r moves. state.z_human is
// ignored; the robot sees observed_zh through edge a_rh.
ConsensusStep consensus_step(const opinion::OpinionState& state, ConsensusOption o,
                             const BiasGains& g, const opinion::AgentParams& p, int a_rh,
                             double observed_zh, double dt);

int sgn(double x);

}  // namespace consensus_lab::bias
