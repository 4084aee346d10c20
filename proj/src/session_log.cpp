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

#include "consensus_lab/session_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::session_log {

using nlohmann::json;
using protocol::Outcome;
using protocol::TrialRecord;

namespace {

json option_json(const std::optional<bias::ConsensusOption>& o) {
  return o ? json(std::string(bias::to_string(*o))) : json(nullptr);
}

std::optional<bias::ConsensusOption> option_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return bias::option_from_string(j.get<std::string>());
}

behavior::Action action_from_string(const std::string& s) {
  for (auto a : {behavior::Action::Stopped, behavior::Action::TowardRed, behavior::Action::TowardBlue,
                 behavior::Action::Paused, behavior::Action::Pressed}) {
    if (behavior::to_string(a) == s) return a;
  }
  throw ArgumentError("unknown action '" + s + "'");
}

human::GazeLevel level_from_string(const std::string& s) {
  using human::GazeLevel;
  for (auto l : {GazeLevel::Neutral, GazeLevel::Minimal, GazeLevel::Low, GazeLevel::Moderate,
                 GazeLevel::Significant, GazeLevel::Extreme}) {
    if (human::to_string(l) == s) return l;
  }
  throw ArgumentError("unknown gaze level '" + s + "'");
}

}  // namespace

json trial_to_json(const TrialRecord& r, int participant, bool include_series) {
  json j;
  j["schema"] = kSchemaVersion;
  j["participant"] = participant;
  j["trial"] = r.config.index;
  j["mode"] = std::string(protocol::to_string(r.config.mode));
  j["option"] = option_json(r.config.option);
  j["gaze"] = {{"level", std::string(human::to_string(r.config.gaze.level))},
               {"target", std::string(bias::to_string(r.config.gaze.target))},
               {"yaw", r.config.gaze.yaw},
               {"pitch", r.config.gaze.pitch}};
  j["countdown"] = r.config.countdown;
  j["human_press"] = option_json(r.human_press);
  j["robot_press"] = std::string(bias::to_string(r.robot_press));
  j["human_switch_count"] = r.human_switch_count;
  j["switched_after_commit"] = r.switched_after_commit;
  j["commit_crossing_t"] = r.commit_crossing_t ? json(*r.commit_crossing_t) : json(nullptr);
  j["clicker"] = r.clicker ? json(*r.clicker) : json(nullptr);
  j["score_delta"] = r.score_delta;
  j["outcome"] = std::string(protocol::to_string(r.outcome));
  j["violation"] = r.violation;
  j["end_reason"] = std::string(protocol::to_string(r.end_reason));
  j["duration"] = r.duration;
  j["last_bias_update_t"] = r.last_bias_update_t;
  if (!r.error.empty()) j["error"] = r.error;
  if (include_series) {
    json t = json::array(), x = json::array(), y = json::array(), zh = json::array(),
         zr = json::array(), br = json::array(), ax = json::array(), ay = json::array(),
         act = json::array();
    for (const protocol::Sample& s : r.samples) {
      t.push_back(s.t);
      x.push_back(s.human.x);
      y.push_back(s.human.y);
      zh.push_back(s.z_hat);
      zr.push_back(s.z_robot);
      br.push_back(s.b_robot);
      ax.push_back(s.arm.x);
      ay.push_back(s.arm.y);
      act.push_back(std::string(behavior::to_string(s.action)));
    }
    j["series"] = {{"t", t},       {"x", x},       {"y", y},       {"z_hat", zh},   {"z_r", zr},
                   {"b_r", br},    {"arm_x", ax},  {"arm_y", ay},  {"action", act}};
  }
  return j;
}

TrialRecord trial_from_json(const json& j) {
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) throw ArgumentError("unsupported schema");
    TrialRecord r;
    r.config = protocol::trial_config(j.at("trial").get<int>());
    r.config.option = option_from(j.at("option"));
    const json& g = j.at("gaze");
    r.config.gaze = {level_from_string(g.at("level").get<std::string>()),
                     bias::option_from_string(g.at("target").get<std::string>()),
                     g.at("yaw").get<double>(), g.at("pitch").get<double>()};
    r.config.countdown = j.value("countdown", 1.0);
    r.human_press = option_from(j.at("human_press"));
    r.robot_press = bias::option_from_string(j.at("robot_press").get<std::string>());
    r.human_switch_count = j.at("human_switch_count").get<int>();
    r.switched_after_commit = j.at("switched_after_commit").get<bool>();
    if (j.contains("commit_crossing_t") && !j["commit_crossing_t"].is_null()) {
      r.commit_crossing_t = j["commit_crossing_t"].get<double>();
    }
    if (j.contains("clicker") && !j["clicker"].is_null()) r.clicker = j["clicker"].get<int>();
    r.score_delta = j.at("score_delta").get<int>();
    r.outcome = protocol::outcome_from_string(j.at("outcome").get<std::string>());
    r.violation = j.value("violation", false);
    r.end_reason = protocol::end_reason_from_string(j.value("end_reason", std::string("human_press")));
    r.duration = j.value("duration", 0.0);
    r.last_bias_update_t = j.value("last_bias_update_t", -1.0);
    r.error = j.value("error", std::string());
    if (j.contains("series")) {
      const json& s = j["series"];
      const std::size_t n = s.at("t").size();
      for (const char* col : {"x", "y", "z_hat", "z_r", "b_r", "arm_x", "arm_y", "action"}) {
        if (s.at(col).size() != n) throw ArgumentError(std::string("series column length: ") + col);
      }
      r.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        protocol::Sample& p = r.samples[i];
        p.t = s["t"][i].get<double>();
        p.human = {s["x"][i].get<double>(), s["y"][i].get<double>()};
        p.z_hat = s["z_hat"][i].get<double>();
        p.z_robot = s["z_r"][i].get<double>();
        p.b_robot = s["b_r"][i].get<double>();
        p.arm = {s["arm_x"][i].get<double>(), s["arm_y"][i].get<double>()};
        p.action = action_from_string(s["action"][i].get<std::string>());
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed trial record: ") + e.what());
  }
}

json summary_json(const protocol::SessionRecord& s) {
  json outcomes = json::array();
  json scores = json::array();
  for (const TrialRecord& r : s.trials) {
    outcomes.push_back(std::string(protocol::to_string(r.outcome)));
    scores.push_back(r.score_delta);
  }
  return {{"schema", kSchemaVersion},  {"participant", s.participant_id},
          {"trials", s.trials.size()}, {"total_score", s.total_score},
          {"outcomes", outcomes},      {"score_deltas", scores},
          {"aborted", s.aborted}};
}

std::string session_stem(int participant) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "session_%04d", participant);
  return buf;
}

void write_file_synced(const std::filesystem::path& path, const std::string& text) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::size_t off = 0;
  while (off < text.size()) {
    const ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string msg = std::strerror(errno);
      ::close(fd);
      throw std::runtime_error("write failed for " + path.string() + ": " + msg);
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd);
    throw std::runtime_error("fsync failed for " + path.string() + ": " + msg);
  }
  if (::close(fd) != 0) throw std::runtime_error("close failed for " + path.string());
}

void write_session(const std::filesystem::path& dir, const std::string& stem,
                   const protocol::SessionRecord& s, bool include_series) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::string lines;
  for (const TrialRecord& r : s.trials) {
    lines += trial_to_json(r, s.participant_id, include_series).dump();
    lines += '\n';
  }
  write_file_synced(dir / (stem + ".ndjson"), lines);
  write_file_synced(dir / (stem + ".summary.json"), summary_json(s).dump(2) + "\n");
}

LoadedLogs read_logs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ArgumentError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ndjson") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  LoadedLogs out;
  // (file, participant) -> trial index -> outcome
  std::map<std::pair<std::string, int>, std::map<int, Outcome>> sessions;
  for (const auto& f : files) {
    ++out.files;
    std::ifstream in(f);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        const int trial = j.at("trial").get<int>();
        if (j.at("schema").get<int>() != kSchemaVersion || trial < 1 ||
            trial > protocol::kTrialsPerSession) {
          throw ArgumentError("bad record");
        }
        sessions[{f.string(), j.at("participant").get<int>()}][trial] =
            protocol::outcome_from_string(j.at("outcome").get<std::string>());
      } catch (const std::exception&) {
        ++out.skipped_lines;
      }
    }
  }
  for (const auto& [key, trials] : sessions) {
    if (trials.size() != static_cast<std::size_t>(protocol::kTrialsPerSession)) {
      ++out.incomplete_sessions;
      continue;
    }
    stats::ParticipantOutcomes p{key.second, {}};
    for (const auto& [idx, o] : trials) p.trials.push_back(o);
    out.participants.push_back(std::move(p));
  }
  return out;
}

}  // namespace consensus_lab::session_log
