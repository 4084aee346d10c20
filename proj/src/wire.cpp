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

#include "consensus_lab/wire.hpp"

#include <cmath>

namespace consensus_lab::wire {

using nlohmann::json;

namespace {

double finite_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw WireError(kParse, std::string("field '") + key + "' must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw WireError(kParse, std::string("field '") + key + "' is not finite");
  return v;
}

json option_or_null(const std::optional<bias::ConsensusOption>& o) {
  return o ? json(std::string(bias::to_string(*o))) : json(nullptr);
}

}  // namespace

ClientMessage parse_client(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw WireError(kParse, "malformed JSON");
  return parse_client(j);
}

ClientMessage parse_client(const json& j) {
  if (!j.is_object()) throw WireError(kParse, "message must be a JSON object");
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) throw WireError(kParse, "missing string field 'type'");
  const std::string& t = type->get_ref<const std::string&>();
  if (t == "Hello") {
    Hello h;
    if (auto n = j.find("name"); n != j.end()) {
      if (!n->is_string()) throw WireError(kParse, "field 'name' must be a string");
      h.name = n->get<std::string>();
    }
    return h;
  }
  if (t == "Ready") return Ready{};
  if (t == "Cursor") return Cursor{finite_number(j, "t"), finite_number(j, "x"), finite_number(j, "y")};
  if (t == "ClickerCount") {
    auto n = j.find("n");
    if (n == j.end() || !n->is_number_integer()) throw WireError(kParse, "field 'n' must be an integer");
    const long long v = n->get<long long>();
    if (v < 0 || v > 1000000) throw WireError(kParse, "field 'n' out of range");
    return ClickerCount{static_cast<int>(v)};
  }
  if (t == "Quit") return Quit{};
  throw WireError(kUnknownType, "unknown message type '" + t + "'");
}

json to_json(const ClientMessage& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hello>) {
          return {{"type", "Hello"}, {"name", v.name}};
        } else if constexpr (std::is_same_v<T, Ready>) {
          return {{"type", "Ready"}};
        } else if constexpr (std::is_same_v<T, Cursor>) {
          return {{"type", "Cursor"}, {"t", v.t}, {"x", v.x}, {"y", v.y}};
        } else if constexpr (std::is_same_v<T, ClickerCount>) {
          return {{"type", "ClickerCount"}, {"n", v.n}};
        } else {
          return {{"type", "Quit"}};
        }
      },
      m);
}

json trial_start(const protocol::TrialConfig& c) {
  return {{"type", "TrialStart"},
          {"index", c.index},
          {"gaze_yaw", c.gaze.yaw},
          {"gaze_pitch", c.gaze.pitch},
          {"countdown_ms", static_cast<int>(std::lround(c.countdown * 1000.0))}};
}

json tick(double t, Vec2 arm, behavior::Action action, int score) {
  return {{"type", "Tick"},
          {"t", t},
          {"arm_x", arm.x},
          {"arm_y", arm.y},
          {"action", std::string(behavior::to_string(action))},
          {"score", score}};
}

json trial_end(const protocol::TrialRecord& r) {
  return {{"type", "TrialEnd"},
          {"human_press", option_or_null(r.human_press)},
          {"robot_press", std::string(bias::to_string(r.robot_press))},
          {"outcome", std::string(protocol::to_string(r.outcome))},
          {"score_delta", r.score_delta}};
}

json session_end(const protocol::SessionRecord& s) {
  json outcomes = json::array();
  for (const auto& r : s.trials) outcomes.push_back(std::string(protocol::to_string(r.outcome)));
  return {{"type", "SessionEnd"}, {"total", s.total_score}, {"outcomes", outcomes}};
}

json error(std::string_view code, std::string_view msg) {
  return {{"type", "Error"}, {"code", code}, {"msg", msg}};
}

}  // namespace consensus_lab::wire
