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

#pragma once

#include <algorithm>
#include <cmath>

namespace consensus_lab {

// Image-space point or vector in pixels; y grows downward.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Axis-aligned box given by two corners in the order they were configured.
// The first corner is the box's anchor: distances, arm targets and the
// nearest-buzzer comparison are all measured to it.
struct Rect {
  Vec2 first;
  Vec2 second;

  Vec2 anchor() const { return first; }
  double min_x() const { return std::min(first.x, second.x); }
  double max_x() const { return std::max(first.x, second.x); }
  double min_y() const { return std::min(first.y, second.y); }
  double max_y() const { return std::max(first.y, second.y); }
  Vec2 center() const { return 0.5 * (first + second); }

  // Closed on every edge.
  bool contains(Vec2 p) const {
    return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y();
  }

  bool overlaps(const Rect& o) const {
    return !(max_x() < o.min_x() || o.max_x() < min_x() || max_y() < o.min_y() ||
             o.max_y() < min_y());
  }
};

// Reflection about the vertical line x = width / 2.
constexpr Vec2 mirror_x(Vec2 p, double width) { return {width - p.x, p.y}; }

inline Rect mirror_x(const Rect& r, double width) {
  return {mirror_x(r.first, width), mirror_x(r.second, width)};
}

}  // namespace consensus_lab
