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

// Wire messages between the session host and a live client. Every message
// is a single-line JSON object with a "type" field.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "consensus_lab/protocol.hpp"

namespace consensus_lab::wire {

// Error codes sent in Error{code, msg}.
inline constexpr std::string_view kParse = "parse";
inline constexpr std::string_view kBadState = "bad_state";
inline constexpr std::string_view kUnknownType = "unknown_type";
inline constexpr std::string_view kBusy = "busy";
inline constexpr std::string_view kStorage = "storage";

class WireError : public std::runtime_error {
 public:
  WireError(std::string_view code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Hello {
  std::string name;
};
struct Ready {};
struct Cursor {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};
struct ClickerCount {
  int n = 0;
};
struct Quit {};

using ClientMessage = std::variant<Hello, Ready, Cursor, ClickerCount, Quit>;

// Throws WireError (parse or unknown_type). Unknown fields are ignored.
ClientMessage parse_client(std::string_view text);
ClientMessage parse_client(const nlohmann::json& j);
inline ClientMessage parse_client(const char* text) { return parse_client(std::string_view(text)); }
inline ClientMessage parse_client(const std::string& text) { return parse_client(std::string_view(text)); }

nlohmann::json to_json(const ClientMessage& m);

nlohmann::json trial_start(const protocol::TrialConfig& c);
nlohmann::json tick(double t, Vec2 arm, behavior::Action action, int score);
nlohmann::json trial_end(const protocol::TrialRecord& r);
nlohmann::json session_end(const protocol::SessionRecord& s);
nlohmann::json error(std::string_view code, std::string_view msg);

}  // namespace consensus_lab::wire
