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

// JSON configuration shared by every command. Missing keys keep their
// defaults; unknown keys are rejected with their JSON pointer.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "consensus_lab/analysis.hpp"
#include "consensus_lab/protocol.hpp"
#include "consensus_lab/synthetic_human.hpp"

namespace consensus_lab::config {

struct ScriptDefaults {
  double speed = 250.0;
  double reaction_delay = 0.05;
};

struct ServiceSettings {
  int port = 8080;
  int max_sessions = 16;
  double inactivity_timeout = 10.0;  // s
  std::string data_dir = "data";
  std::string static_dir;  // empty: no static files
};

struct GazeOverride {
  double yaw = 0.0;
  double pitch = 0.0;
};

struct Config {
  protocol::SimulationParams sim;
  human::CohortParams cohort;
  ScriptDefaults script;
  double countdown = 1.0;
  std::map<int, GazeOverride> gaze_overrides;  // trial index -> angles
  analysis::SweepSettings sweep;
  analysis::ContourSettings contours;
  analysis::NewtonSettings newton;
  ServiceSettings service;

  std::vector<protocol::TrialConfig> schedule() const;

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError with the offending JSON pointer.
Config from_json(const nlohmann::json& j);
nlohmann::json to_json(const Config& c);

Config load(const std::filesystem::path& path);

// "model" or a script kind (direct, mid_switch, multi_switch, early_switch).
// Scripted humans start toward red and follow any gaze cue. Throws
// ArgumentError for anything else.
protocol::AgentFactory agent_factory(const Config& c, std::string_view kind);

}  // namespace consensus_lab::config
