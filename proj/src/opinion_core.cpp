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

#include "consensus_lab/opinion_core.hpp"

#include <cmath>
#include <string>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/rk4.hpp"

namespace consensus_lab::opinion {
namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ArgumentError("time step must be positive, got " + std::to_string(dt));
  }
}

void check_bounded(double z) {
  if (!std::isfinite(z) || std::abs(z) > kBlowupLimit) {
    throw NumericalError("opinion integration blew up (|z| > 1e6 or NaN)");
  }
}

}  // namespace

void AgentParams::validate() const {
  if (!all_finite({decay, attention, self_gain, coupling})) {
    throw ConfigError("agent parameters must be finite");
  }
  if (!(decay > 0.0)) throw ConfigError("decay d must be positive");
}

double Adjacency::eigen_max() const {
  return std::sqrt(static_cast<double>(robot_hears_human * human_hears_robot));
}

double Adjacency::eigen_min() const { return -eigen_max(); }

void Adjacency::validate() const {
  auto binary = [](int a) { return a == 0 || a == 1; };
  if (!binary(robot_hears_human) || !binary(human_hears_robot)) {
    throw ConfigError("adjacency entries must be 0 or 1");
  }
}

bool OpinionState::finite() const { return all_finite({z_robot, z_human, b_robot, b_human, t}); }

double opinion_rate(double z_self, double z_other, const AgentParams& p, int edge, double bias) {
  if (!all_finite({z_self, z_other, bias})) throw DomainError("opinion_rate: non-finite input");
  return -p.decay * z_self +
         p.attention * std::tanh(p.self_gain * z_self + p.coupling * edge * z_other) + bias;
}

OpinionState step(const OpinionState& s, const AgentParams& robot, const AgentParams& human,
                  const Adjacency& adj, double dt) {
  check_dt(dt);
  if (!s.finite()) throw DomainError("step: non-finite state");
  const int a_rh = adj.robot_hears_human;
  const int a_hr = adj.human_hears_robot;
  auto f = [&](const StateVec<2>& z) -> StateVec<2> {
    return {opinion_rate(z[0], z[1], robot, a_rh, s.b_robot),
            opinion_rate(z[1], z[0], human, a_hr, s.b_human)};
  };
  const StateVec<2> next = rk4_step<2>({s.z_robot, s.z_human}, dt, f);
  check_bounded(next[0]);
  check_bounded(next[1]);
  OpinionState out = s;
  out.z_robot = next[0];
  out.z_human = next[1];
  out.t = s.t + dt;
  return out;
}

double step_agent(double z_self, double z_other, const AgentParams& p, int edge, double bias,
                  double dt) {
  check_dt(dt);
  auto f = [&](const StateVec<1>& z) -> StateVec<1> {
    return {opinion_rate(z[0], z_other, p, edge, bias)};
  };
  const double next = rk4_step<1>({z_self}, dt, f)[0];
  check_bounded(next);
  return next;
}

std::array<std::complex<double>, 2> eigenvalues_2x2(
    const std::array<std::array<double, 2>, 2>& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return {std::complex<double>(half - r, 0.0), std::complex<double>(half + r, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half, -im), std::complex<double>(half, im)};
}

JacobianInfo jacobian(double z_robot, double z_human, const AgentParams& p, const Adjacency& adj) {
  if (!all_finite({z_robot, z_human})) throw DomainError("jacobian: non-finite input");
  const double d = p.decay, u = p.attention, al = p.self_gain, g = p.coupling;
  const int a_rh = adj.robot_hears_human;
  const int a_hr = adj.human_hears_robot;
  const double s1 = sech2(al * z_robot + g * a_rh * z_human);
  const double s2 = sech2(al * z_human + g * a_hr * z_robot);
  JacobianInfo info;
  info.entries = {{{-d + u * al * s1, u * g * a_rh * s1}, {u * g * a_hr * s2, -d + u * al * s2}}};
  info.eigenvalues = eigenvalues_2x2(info.entries);
  info.stable = info.eigenvalues[0].real() < 0.0 && info.eigenvalues[1].real() < 0.0;
  return info;
}

double critical_attention(const AgentParams& p, double lambda) {
  const double denom = p.self_gain + p.coupling * lambda;
  if (denom == 0.0) {
    throw ConfigError("critical attention undefined: alpha + gamma * lambda == 0");
  }
  return p.decay / denom;
}

double dissensus_threshold(const AgentParams& p, const Adjacency& adj) {
  if (!(p.coupling < 0.0)) {
    throw ConfigError("dissensus requires negative coupling gamma, got " +
                      std::to_string(p.coupling));
  }
  return critical_attention(p, adj.eigen_min());
}

void validate_dissensus(const AgentParams& p, const Adjacency& adj) {
  p.validate();
  const double ud = dissensus_threshold(p, adj);
  if (!(p.attention > ud)) {
    throw ConfigError("attention u = " + std::to_string(p.attention) +
                      " does not exceed the dissensus threshold u_d* = " + std::to_string(ud));
  }
}

void require_homogeneous(const AgentParams& robot, const AgentParams& human) {
  if (!(robot == human)) {
    throw ConfigError("threshold analysis requires identical robot and human parameters");
  }
}

}  // namespace consensus_lab::opinion
