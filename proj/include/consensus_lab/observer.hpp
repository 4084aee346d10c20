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

// Observed human opinion from hand or cursor motion.
//
//   zhat_h = a cos(theta) tanh(k / dist)

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/geometry.hpp"

namespace consensus_lab::observer {

struct Workspace {
  double width = 1280.0;
  double height = 720.0;
  // First corner of each box is its anchor (inner bottom corner).
  Rect red_box{{960.0, 200.0}, {1120.0, 80.0}};
  Rect blue_box{{320.0, 200.0}, {160.0, 80.0}};
  double commit_line_y = 330.0;
  Vec2 human_start{640.0, 680.0};
  Vec2 robot_home{640.0, 640.0};

  double diag() const { return std::hypot(width, height); }
  bool in_bounds(Vec2 p) const;

  // Boxes inside bounds, disjoint, red right of blue; throws ConfigError.
  void validate() const;

  // Reflected about x = width / 2 with the boxes swapped.
  Workspace mirrored() const;
};

struct ObserverParams {
  double a = 8.0;
  double k = 1.5;
  double eps_d = 1e-3;
  double eps_m = 1e-6;  // pixels

  void validate() const;
};

struct ObservationFrame {
  double t = 0.0;
  Vec2 p;
  Vec2 p_prev;
  Vec2 M;
  double theta = 0.0;
  double dist = 1.0;
  double z_hat = 0.0;
  bool moved = false;
};

// Componentwise mean; throws ArgumentError when empty.
Vec2 hand_center(const std::vector<Vec2>& landmarks);

// Folded movement angle in [0, pi), or nullopt when |M| < eps_m.
std::optional<double> movement_angle(Vec2 p, Vec2 p_prev, double eps_m);

double target_distance(Vec2 p, double theta, const Workspace& ws, double eps_d);

double observe_opinion(double theta, double dist, const ObserverParams& params);

// Per-stream state: previous position and held angle.
class Observer {
 public:
  Observer(Workspace ws, ObserverParams params);

  ObservationFrame observe(double t, Vec2 p);
  void reset();
  bool has_angle() const { return theta_.has_value(); }

 private:
  Workspace ws_;
  ObserverParams params_;
  std::optional<Vec2> prev_;
  std::optional<double> theta_;
};

struct TrajectorySample {
  double t = 0.0;
  Vec2 p;
};

// CSV with header "t,x,y" or "t,x1,y1,...,x21,y21" (landmarks averaged).
std::vector<TrajectorySample> read_trajectory_csv(std::istream& in);
std::vector<TrajectorySample> read_trajectory_csv_file(const std::string& path);

}  // namespace consensus_lab::observer
