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

// Batch commands behind the consensus-lab binary. Each returns the process
// exit code; configuration and usage problems surface as ConfigError or
// ArgumentError and map to exit code 2 in main.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "consensus_lab/config.hpp"

namespace consensus_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct SweepOptions {
  std::filesystem::path out = "out";
  std::optional<int> resolution;
  bool serial = false;
};

// Writes sweep.csv and sweep_report.json. Exit 0 iff no cell mismatches.
int cmd_sweep(const config::Config& c, const SweepOptions& o);

struct EquilibriaOptions {
  double b_r = 0.0;
  double b_h = 0.0;
  std::filesystem::path out = "out";
};

// Writes equilibria.csv, contours.csv and equilibria_report.json.
int cmd_equilibria(const config::Config& c, const EquilibriaOptions& o);

struct ProtocolOptions {
  int participants = 51;
  std::string human = "model";
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  bool series = true;
  bool serial = false;
};

// Writes one log pair per participant plus outcomes.csv and summary.json.
int cmd_protocol(const config::Config& c, const ProtocolOptions& o);

struct StatsOptions {
  std::filesystem::path logs;
  std::optional<std::filesystem::path> out;  // summary JSON; stdout always gets it
};

nlohmann::json stats_summary(const std::filesystem::path& logs);
int cmd_stats(const StatsOptions& o);

struct ServeOptions {
  std::optional<int> port;
  std::optional<std::string> data_dir;
  std::optional<std::string> static_dir;
};

// Flag beats environment (CONSENSUS_LAB_PORT, CONSENSUS_LAB_DATA_DIR) beats config.
config::ServiceSettings resolve_service(const config::Config& c, const ServeOptions& o);

int cmd_serve(const config::Config& c, const ServeOptions& o);

}  // namespace consensus_lab::cli
