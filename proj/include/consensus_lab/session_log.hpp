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

// Session logs: one JSON trial record per line plus a summary document.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "consensus_lab/protocol.hpp"
#include "consensus_lab/stats.hpp"

namespace consensus_lab::session_log {

inline constexpr int kSchemaVersion = 1;

nlohmann::json trial_to_json(const protocol::TrialRecord& r, int participant,
                             bool include_series = true);

// Inverse of trial_to_json; throws ArgumentError on a malformed record.
protocol::TrialRecord trial_from_json(const nlohmann::json& j);

nlohmann::json summary_json(const protocol::SessionRecord& s);

// Writes `<stem>.ndjson` and `<stem>.summary.json` into dir, fsync'd.
// Throws std::runtime_error on storage failure.
void write_session(const std::filesystem::path& dir, const std::string& stem,
                   const protocol::SessionRecord& s, bool include_series = true);

std::string session_stem(int participant);

// Writes text to path and fsyncs it.
void write_file_synced(const std::filesystem::path& path, const std::string& text);

struct LoadedLogs {
  std::vector<stats::ParticipantOutcomes> participants;  // complete sessions only
  int files = 0;
  int skipped_lines = 0;
  int incomplete_sessions = 0;
};

// Reads every *.ndjson under dir. Malformed lines are counted and skipped.
LoadedLogs read_logs(const std::filesystem::path& dir);

}  // namespace consensus_lab::session_log
