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

// Two-agent, two-option nonlinear opinion dynamics.
//
//   z_r' = -d z_r + u tanh(alpha z_r + gamma a_rh z_h) + b_r
//   z_h' = -d z_h + u tanh(alpha z_h + gamma a_hr z_r) + b_h
//
// Positive opinions lean red, negative lean blue.

#pragma once

#include <array>
#include <complex>

namespace consensus_lab::opinion {

struct AgentParams {
  double decay = 10.0;       // d > 0, 1/s
  double attention = 2.24;   // u
  double self_gain = 0.05;   // alpha
  double coupling = -8.0;    // gamma

  // d = 10, u = 2.24, alpha = 0.05, gamma = -8: the shipped default for both
  // agents.
  static AgentParams reference() { return {}; }

  // Throws ConfigError unless d > 0 and every field is finite.
  void validate() const;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

// Binary directed edges of the two-node network, A = [0 a_rh; a_hr 0].
struct Adjacency {
  int robot_hears_human = 1;  // a_rh
  int human_hears_robot = 1;  // a_hr

  // Eigenvalues of A, +-sqrt(a_rh * a_hr).
  double eigen_max() const;
  double eigen_min() const;
  void validate() const;
};

struct OpinionState {
  double z_robot = 0.0;
  double z_human = 0.0;
  double b_robot = 0.0;
  double b_human = 0.0;
  double t = 0.0;

  bool finite() const;
};

struct JacobianInfo {
  std::array<std::array<double, 2>, 2> entries{};
  std::array<std::complex<double>, 2> eigenvalues{};
  bool stable = false;  // both real parts < 0
};

// Largest |z| an integration may reach before it is treated as a blow-up.
inline constexpr double kBlowupLimit = 1e6;

// Right-hand side of one agent's opinion equation. Throws DomainError on
// non-finite input.
double opinion_rate(double z_self, double z_other, const AgentParams& p, int edge, double bias);

// One RK4 step of the coupled pair; biases are held constant within the step.
// Throws ArgumentError for dt <= 0 and NumericalError on blow-up.
OpinionState step(const OpinionState& s, const AgentParams& robot, const AgentParams& human,
                  const Adjacency& adj, double dt);

// One RK4 step of a single agent with the other agent's opinion frozen.
double step_agent(double z_self, double z_other, const AgentParams& p, int edge, double bias,
                  double dt);

// Jacobian of the homogeneous coupled system (the bias does not enter it).
JacobianInfo jacobian(double z_robot, double z_human, const AgentParams& p, const Adjacency& adj);

// Eigenvalues of a real 2x2 matrix.
std::array<std::complex<double>, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& m);

// u* = d / (alpha + gamma lambda): the attention at which the mode with
// adjacency eigenvalue lambda loses stability. Throws ConfigError when
// alpha + gamma lambda == 0.
double critical_attention(const AgentParams& p, double lambda);

// u_d* = d / (alpha + gamma lambda_min). Requires gamma < 0.
double dissensus_threshold(const AgentParams& p, const Adjacency& adj);

// Throws ConfigError unless gamma < 0 and u > u_d*.
void validate_dissensus(const AgentParams& p, const Adjacency& adj);

// The threshold formulas assume one shared parameter set.
void require_homogeneous(const AgentParams& robot, const AgentParams& human);

}  // namespace consensus_lab::opinion
