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

#include "consensus_lab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::config {

using nlohmann::json;

namespace {

class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  std::string where() const { return path_.empty() ? "/" : path_; }
  std::string at(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  const json& get(const std::string& key) { return j_.at(key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key) + ": expected a number");
    out = v.get<double>();
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
    out = v.get<int>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec2 read_vec(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Rect read_rect(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(path + ": expected [[x1, y1], [x2, y2]]");
  return {read_vec(v[0], path + "/0"), read_vec(v[1], path + "/1")};
}

json vec_json(Vec2 p) { return json::array({p.x, p.y}); }
json rect_json(const Rect& r) { return json::array({vec_json(r.first), vec_json(r.second)}); }

void read_agent(Obj& parent, const std::string& key, opinion::AgentParams& p) {
  if (!parent.has(key)) return;
  Obj o(parent.get(key), parent.at(key));
  o.number("decay", p.decay);
  o.number("attention", p.attention);
  o.number("self_gain", p.self_gain);
  o.number("coupling", p.coupling);
  o.finish();
}

json agent_json(const opinion::AgentParams& p) {
  return {{"decay", p.decay}, {"attention", p.attention}, {"self_gain", p.self_gain}, {"coupling", p.coupling}};
}

}  // namespace

std::vector<protocol::TrialConfig> Config::schedule() const {
  std::vector<protocol::TrialConfig> s = protocol::default_schedule();
  for (auto& t : s) {
    t.countdown = countdown;
    auto it = gaze_overrides.find(t.index);
    if (it != gaze_overrides.end()) {
      t.gaze.yaw = it->second.yaw;
      t.gaze.pitch = it->second.pitch;
    }
  }
  return s;
}

void Config::validate() const {
  sim.validate();
  cohort.validate();
  const double low = sim.gaze_multipliers[static_cast<std::size_t>(human::GazeLevel::Low)];
  if (!(cohort.susceptibility_min * low > 1.0)) {
    throw ConfigError("/cohort/susceptibility_min: Low gaze would fall below the attention threshold");
  }
  if (!(script.speed > 0.0)) throw ConfigError("/script/speed: must be positive");
  if (!(script.reaction_delay >= 0.0)) throw ConfigError("/script/reaction_delay: must be >= 0");
  if (!(countdown >= 0.0)) throw ConfigError("/protocol/countdown: must be >= 0");
  for (const auto& [idx, g] : gaze_overrides) {
    if (idx < 1 || idx > protocol::kTrialsPerSession) {
      throw ConfigError("/protocol/gaze_schedule: trial index out of range");
    }
  }
  protocol::validate_schedule(schedule());
  sweep.validate();
  if (contours.resolution < 2 || !(contours.hi > contours.lo)) {
    throw ConfigError("/contours: need resolution >= 2 and hi > lo");
  }
  if (newton.seeds_per_axis < 1 || newton.max_iter < 1 || !(newton.hi > newton.lo)) {
    throw ConfigError("/newton: need seeds >= 1, max_iter >= 1 and hi > lo");
  }
  if (service.port < 0 || service.port > 65535) throw ConfigError("/service/port: out of range");
  if (service.max_sessions < 1) throw ConfigError("/service/max_sessions: must be >= 1");
  if (!(service.inactivity_timeout > 0.0)) {
    throw ConfigError("/service/inactivity_timeout: must be positive");
  }
}

Config from_json(const json& j) {
  Config c;
  Obj root(j, "");
  read_agent(root, "robot", c.sim.robot);
  read_agent(root, "human", c.cohort.params);
  if (root.has("adjacency")) {
    Obj o(root.get("adjacency"), "/adjacency");
    o.integer("a_rh", c.sim.adjacency.robot_hears_human);
    o.integer("a_hr", c.sim.adjacency.human_hears_robot);
    o.finish();
  }
  if (root.has("gains")) {
    Obj o(root.get("gains"), "/gains");
    o.number("sigma_mag", c.sim.gains.sigma_mag);
    o.number("K", c.sim.gains.K);
    o.number("b_star", c.sim.gains.b_star);
    o.number("b_limit", c.sim.gains.b_limit);
    o.finish();
  }
  if (root.has("observer")) {
    Obj o(root.get("observer"), "/observer");
    o.number("a", c.sim.observer.a);
    o.number("k", c.sim.observer.k);
    o.number("eps_d", c.sim.observer.eps_d);
    o.number("eps_m", c.sim.observer.eps_m);
    o.finish();
  }
  if (root.has("workspace")) {
    Obj o(root.get("workspace"), "/workspace");
    auto& ws = c.sim.workspace;
    o.number("width", ws.width);
    o.number("height", ws.height);
    if (o.has("red_box")) ws.red_box = read_rect(o.get("red_box"), "/workspace/red_box");
    if (o.has("blue_box")) ws.blue_box = read_rect(o.get("blue_box"), "/workspace/blue_box");
    o.number("commit_line_y", ws.commit_line_y);
    if (o.has("human_start")) ws.human_start = read_vec(o.get("human_start"), "/workspace/human_start");
    if (o.has("robot_home")) ws.robot_home = read_vec(o.get("robot_home"), "/workspace/robot_home");
    o.finish();
  }
  if (root.has("behavior")) {
    Obj o(root.get("behavior"), "/behavior");
    o.integer("c_max", c.sim.c_max);
    o.number("arm_speed", c.sim.arm_speed);
    o.finish();
  }
  if (root.has("protocol")) {
    Obj o(root.get("protocol"), "/protocol");
    o.number("dt", c.sim.dt);
    o.number("trial_cap", c.sim.trial_cap);
    o.number("switch_persistence", c.sim.switch_persistence);
    o.number("countdown", c.countdown);
    if (o.has("gaze_multipliers")) {
      const json& m = o.get("gaze_multipliers");
      if (!m.is_array() || m.size() != c.sim.gaze_multipliers.size()) {
        throw ConfigError("/protocol/gaze_multipliers: expected 6 numbers");
      }
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_number()) {
          throw ConfigError("/protocol/gaze_multipliers/" + std::to_string(i) + ": expected a number");
        }
        c.sim.gaze_multipliers[i] = m[i].get<double>();
      }
    }
    if (o.has("gaze_schedule")) {
      const json& s = o.get("gaze_schedule");
      if (!s.is_array()) throw ConfigError("/protocol/gaze_schedule: expected an array");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string p = "/protocol/gaze_schedule/" + std::to_string(i);
        Obj e(s[i], p);
        int trial = 0;
        GazeOverride g;
        e.integer("trial", trial);
        e.number("yaw", g.yaw);
        e.number("pitch", g.pitch);
        e.finish();
        if (trial < 1 || trial > protocol::kTrialsPerSession) {
          throw ConfigError(p + "/trial: must be in 1..8");
        }
        c.gaze_overrides[trial] = g;
      }
    }
    o.finish();
  }
  if (root.has("cohort")) {
    Obj o(root.get("cohort"), "/cohort");
    auto& h = c.cohort;
    if (o.has("perception")) {
      const json& v = o.get("perception");
      if (v == "sign_only") {
        h.perception = human::Perception::SignOnly;
      } else if (v == "full_state") {
        h.perception = human::Perception::FullState;
      } else {
        throw ConfigError("/cohort/perception: expected \"sign_only\" or \"full_state\"");
      }
    }
    o.number("susceptibility_min", h.susceptibility_min);
    o.number("susceptibility_max", h.susceptibility_max);
    o.number("delay_min", h.delay_min);
    o.number("delay_max", h.delay_max);
    o.number("predisposition_min", h.predisposition_min);
    o.number("predisposition_max", h.predisposition_max);
    o.number("speed_min", h.speed_min);
    o.number("speed_max", h.speed_max);
    o.number("motion_saturation", h.motion_saturation);
    o.number("lead_in_follow", h.lead_in_follow);
    o.number("cue_follow", h.cue_follow);
    o.finish();
  }
  if (root.has("script")) {
    Obj o(root.get("script"), "/script");
    o.number("speed", c.script.speed);
    o.number("reaction_delay", c.script.reaction_delay);
    o.finish();
  }
  if (root.has("sweep")) {
    Obj o(root.get("sweep"), "/sweep");
    o.number("lo", c.sweep.lo);
    o.number("hi", c.sweep.hi);
    o.integer("resolution", c.sweep.resolution);
    o.number("t_final", c.sweep.t_final);
    o.number("dt", c.sweep.dt);
    o.number("settle_tol", c.sweep.settle_tol);
    if (o.has("z0") && !o.get("z0").is_null()) c.sweep.z0 = read_vec(o.get("z0"), "/sweep/z0");
    o.finish();
  }
  if (root.has("contours")) {
    Obj o(root.get("contours"), "/contours");
    o.number("lo", c.contours.lo);
    o.number("hi", c.contours.hi);
    o.integer("resolution", c.contours.resolution);
    o.finish();
  }
  if (root.has("newton")) {
    Obj o(root.get("newton"), "/newton");
    o.integer("seeds_per_axis", c.newton.seeds_per_axis);
    o.number("lo", c.newton.lo);
    o.number("hi", c.newton.hi);
    o.integer("max_iter", c.newton.max_iter);
    o.number("tol", c.newton.tol);
    o.number("dedup", c.newton.dedup);
    o.finish();
  }
  if (root.has("service")) {
    Obj o(root.get("service"), "/service");
    o.integer("port", c.service.port);
    o.integer("max_sessions", c.service.max_sessions);
    o.number("inactivity_timeout", c.service.inactivity_timeout);
    o.string("data_dir", c.service.data_dir);
    o.string("static_dir", c.service.static_dir);
    o.finish();
  }
  root.finish();
  c.validate();
  return c;
}

json to_json(const Config& c) {
  const auto& s = c.sim;
  const auto& ws = s.workspace;
  json gaze = json::array();
  for (const auto& [idx, g] : c.gaze_overrides) gaze.push_back({{"trial", idx}, {"yaw", g.yaw}, {"pitch", g.pitch}});
  return {
      {"robot", agent_json(s.robot)},
      {"human", agent_json(c.cohort.params)},
      {"adjacency", {{"a_rh", s.adjacency.robot_hears_human}, {"a_hr", s.adjacency.human_hears_robot}}},
      {"gains", {{"sigma_mag", s.gains.sigma_mag}, {"K", s.gains.K}, {"b_star", s.gains.b_star}, {"b_limit", s.gains.b_limit}}},
      {"observer", {{"a", s.observer.a}, {"k", s.observer.k}, {"eps_d", s.observer.eps_d}, {"eps_m", s.observer.eps_m}}},
      {"workspace",
       {{"width", ws.width},
        {"height", ws.height},
        {"red_box", rect_json(ws.red_box)},
        {"blue_box", rect_json(ws.blue_box)},
        {"commit_line_y", ws.commit_line_y},
        {"human_start", vec_json(ws.human_start)},
        {"robot_home", vec_json(ws.robot_home)}}},
      {"behavior", {{"c_max", s.c_max}, {"arm_speed", s.arm_speed}}},
      {"protocol",
       {{"dt", s.dt},
        {"trial_cap", s.trial_cap},
        {"switch_persistence", s.switch_persistence},
        {"countdown", c.countdown},
        {"gaze_multipliers", s.gaze_multipliers},
        {"gaze_schedule", gaze}}},
      {"cohort",
       {{"perception", c.cohort.perception == human::Perception::SignOnly ? "sign_only" : "full_state"},
        {"susceptibility_min", c.cohort.susceptibility_min},
        {"susceptibility_max", c.cohort.susceptibility_max},
        {"delay_min", c.cohort.delay_min},
        {"delay_max", c.cohort.delay_max},
        {"predisposition_min", c.cohort.predisposition_min},
        {"predisposition_max", c.cohort.predisposition_max},
        {"speed_min", c.cohort.speed_min},
        {"speed_max", c.cohort.speed_max},
        {"motion_saturation", c.cohort.motion_saturation},
        {"lead_in_follow", c.cohort.lead_in_follow},
        {"cue_follow", c.cohort.cue_follow}}},
      {"script", {{"speed", c.script.speed}, {"reaction_delay", c.script.reaction_delay}}},
      {"sweep",
       {{"lo", c.sweep.lo},
        {"hi", c.sweep.hi},
        {"resolution", c.sweep.resolution},
        {"t_final", c.sweep.t_final},
        {"dt", c.sweep.dt},
        {"settle_tol", c.sweep.settle_tol},
        {"z0", c.sweep.z0 ? vec_json(*c.sweep.z0) : json(nullptr)}}},
      {"contours", {{"lo", c.contours.lo}, {"hi", c.contours.hi}, {"resolution", c.contours.resolution}}},
      {"newton",
       {{"seeds_per_axis", c.newton.seeds_per_axis},
        {"lo", c.newton.lo},
        {"hi", c.newton.hi},
        {"max_iter", c.newton.max_iter},
        {"tol", c.newton.tol},
        {"dedup", c.newton.dedup}}},
      {"service",
       {{"port", c.service.port},
        {"max_sessions", c.service.max_sessions},
        {"inactivity_timeout", c.service.inactivity_timeout},
        {"data_dir", c.service.data_dir},
        {"static_dir", c.service.static_dir}}},
  };
}

Config load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

protocol::AgentFactory agent_factory(const Config& c, std::string_view kind) {
  if (kind == "model") {
    const human::CohortParams cohort = c.cohort;
    return [cohort](int, std::uint64_t seed) {
      return std::make_unique<human::ModelHumanAgent>(cohort, seed);
    };
  }
  const human::HumanScript script = human::make_script(
      human::script_kind_from_string(kind), bias::ConsensusOption::Red, c.script.speed,
      c.script.reaction_delay);
  return [script](int, std::uint64_t) { return std::make_unique<human::ScriptedHuman>(script, true); };
}

}  // namespace consensus_lab::config
