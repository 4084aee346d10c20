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

#include "consensus_lab/observer.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::observer {
namespace {

constexpr double kPi = std::numbers::pi;

bool rect_in(const Rect& r, double w, double h) {
  return r.min_x() >= 0.0 && r.max_x() <= w && r.min_y() >= 0.0 && r.max_y() <= h;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_num(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("trajectory line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

bool Workspace::in_bounds(Vec2 p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

void Workspace::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("workspace size must be positive");
  if (!rect_in(red_box, width, height) || !rect_in(blue_box, width, height)) {
    throw ConfigError("workspace boxes must lie inside the workspace");
  }
  if (red_box.overlaps(blue_box)) throw ConfigError("workspace boxes overlap");
  if (!(red_box.center().x > blue_box.center().x)) {
    throw ConfigError("red box must sit to the right of the blue box");
  }
  if (!in_bounds(human_start) || !in_bounds(robot_home)) {
    throw ConfigError("start positions must lie inside the workspace");
  }
  if (!(commit_line_y > 0.0 && commit_line_y < height)) {
    throw ConfigError("commit line must lie inside the workspace");
  }
}

Workspace Workspace::mirrored() const {
  Workspace m = *this;
  m.red_box = mirror_x(blue_box, width);
  m.blue_box = mirror_x(red_box, width);
  m.human_start = mirror_x(human_start, width);
  m.robot_home = mirror_x(robot_home, width);
  return m;
}

void ObserverParams::validate() const {
  if (!(a > 0.0) || !(k > 0.0) || !(eps_d > 0.0) || !(eps_m >= 0.0) || eps_d > 1.0) {
    throw ConfigError("observer: need a > 0, k > 0, 0 < eps_d <= 1, eps_m >= 0");
  }
}

Vec2 hand_center(const std::vector<Vec2>& landmarks) {
  if (landmarks.empty()) throw ArgumentError("hand_center: no landmarks");
  double sx = 0.0, sy = 0.0;
  for (const Vec2& p : landmarks) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(landmarks.size());
  return {sx / n, sy / n};
}

std::optional<double> movement_angle(Vec2 p, Vec2 p_prev, double eps_m) {
  const Vec2 M = p - p_prev;
  if (M.norm() < eps_m || (M.x == 0.0 && M.y == 0.0)) return std::nullopt;
  double th = std::atan2(-M.y, M.x);
  if (th < 0.0) th += 2.0 * kPi;
  if (th >= 2.0 * kPi) th -= 2.0 * kPi;
  if (th >= 1.5 * kPi) {
    th = kPi - (2.0 * kPi - th);
  } else if (th >= kPi) {
    th = th - kPi;
  }
  // pi - (2pi - th) lands in [pi/2, pi); rounding at th -> 2pi can touch pi.
  if (th >= kPi) th = std::nextafter(kPi, 0.0);
  return th;
}

double target_distance(Vec2 p, double theta, const Workspace& ws, double eps_d) {
  const Rect& box = theta >= 0.5 * kPi ? ws.blue_box : ws.red_box;
  const double d = distance(p, box.anchor()) / ws.diag();
  return std::clamp(d, eps_d, 1.0);
}

double observe_opinion(double theta, double dist, const ObserverParams& params) {
  return params.a * std::cos(theta) * std::tanh(params.k / dist);
}

Observer::Observer(Workspace ws, ObserverParams params) : ws_(ws), params_(params) {}

void Observer::reset() {
  prev_.reset();
  theta_.reset();
}

ObservationFrame Observer::observe(double t, Vec2 p) {
  ObservationFrame f;
  f.t = t;
  f.p = p;
  f.p_prev = prev_.value_or(p);
  f.M = p - f.p_prev;
  if (prev_) {
    if (auto th = movement_angle(p, *prev_, params_.eps_m)) {
      theta_ = *th;
      f.moved = true;
    }
  }
  prev_ = p;
  if (!theta_) {
    f.theta = 0.5 * kPi;
    f.dist = 1.0;
    f.z_hat = 0.0;
    return f;
  }
  f.theta = *theta_;
  f.dist = target_distance(p, f.theta, ws_, params_.eps_d);
  f.z_hat = observe_opinion(f.theta, f.dist, params_);
  return f;
}

std::vector<TrajectorySample> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("trajectory: empty input");
  const auto header = split_csv(line);
  bool landmarks = false;
  if (header == std::vector<std::string>{"t", "x", "y"}) {
    landmarks = false;
  } else if (header.size() == 43 && header[0] == "t") {
    for (int i = 1; i <= 21; ++i) {
      if (header[2 * i - 1] != "x" + std::to_string(i) ||
          header[2 * i] != "y" + std::to_string(i)) {
        throw ArgumentError("trajectory: bad landmark header column " + header[2 * i - 1]);
      }
    }
    landmarks = true;
  } else {
    throw ArgumentError("trajectory: header must be t,x,y or t,x1,y1,...,x21,y21");
  }
  std::vector<TrajectorySample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ArgumentError("trajectory line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " columns");
    }
    TrajectorySample s;
    s.t = parse_num(cells[0], line_no);
    if (!landmarks) {
      s.p = {parse_num(cells[1], line_no), parse_num(cells[2], line_no)};
    } else {
      std::vector<Vec2> pts;
      pts.reserve(21);
      for (int i = 0; i < 21; ++i) {
        pts.push_back({parse_num(cells[1 + 2 * i], line_no), parse_num(cells[2 + 2 * i], line_no)});
      }
      s.p = hand_center(pts);
    }
    if (!out.empty() && s.t < out.back().t) {
      throw ArgumentError("trajectory line " + std::to_string(line_no) + ": time goes backwards");
    }
    out.push_back(s);
  }
  return out;
}

std::vector<TrajectorySample> read_trajectory_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open trajectory file " + path);
  return read_trajectory_csv(in);
}

}  // namespace consensus_lab::observer
