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

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "consensus_lab/commands.hpp"
#include "consensus_lab/config.hpp"
#include "consensus_lab/errors.hpp"
#include "support.hpp"

namespace cl = consensus_lab;
using namespace consensus_lab::config;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    from_json(j);
  } catch (const cl::ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ShippedFileMatchesDefaults) {
  const Config c = load(std::filesystem::path(CONSENSUS_LAB_SOURCE_DIR) / "config" / "default.json");
  EXPECT_EQ(to_json(c), to_json(Config{}));
}

TEST(Config, EmptyObjectKeepsDefaults) {
  const Config c = from_json(json::object());
  EXPECT_EQ(c.sim.robot.attention, 2.24);
  EXPECT_EQ(c.sim.gains.b_star, 3.24);
  EXPECT_EQ(c.service.port, 8080);
}

TEST(Config, RoundTripProperty) {
  testkit::Gen g(91);
  for (int i = 0; i < 50; ++i) {
    Config c;
    c.sim.robot.attention = g.uniform(1.5, 3.2);
    c.sim.gains.K = g.uniform(1, 30);
    c.cohort.speed_min = g.uniform(100, 200);
    c.service.port = g.integer(1, 65535);
    c.countdown = g.uniform(0, 3);
    const json j = to_json(c);
    EXPECT_EQ(to_json(from_json(j)), j);
  }
}

TEST(Config, UnknownKeysNamePointer) {
  EXPECT_NE(config_error({{"robot", {{"atention", 2}}}}).find("/robot/atention: unknown key"), std::string::npos);
  EXPECT_NE(config_error({{"nonsense", 1}}).find("/nonsense"), std::string::npos);
}

TEST(Config, TypeAndRangeErrors) {
  EXPECT_NE(config_error({{"robot", {{"attention", "high"}}}}).find("/robot/attention"), std::string::npos);
  EXPECT_NE(config_error({{"service", {{"port", 70000}}}}).find("/service/port"), std::string::npos);
  // positive coupling loads; commands needing dissensus refuse it later
  EXPECT_TRUE(config_error({{"robot", {{"coupling", 8.0}}}}).empty());
  EXPECT_FALSE(config_error({{"gains", {{"b_star", 1.0}}}}).empty());
  EXPECT_NE(config_error({{"cohort", {{"susceptibility_min", 0.9}}}}).find("/cohort/susceptibility_min"),
            std::string::npos);
  EXPECT_NE(config_error({{"protocol", {{"gaze_schedule", {{{"trial", 9}, {"yaw", 0}, {"pitch", 0}}}}}}})
                .find("/trial"),
            std::string::npos);
  const auto dir = testkit::scratch_dir("config_parse");
  std::ofstream(dir / "bad.json") << "{ \"robot\": ";
  EXPECT_THROW(load(dir / "bad.json"), cl::ConfigError);
}

TEST(Config, GazeOverridesReachSchedule) {
  const Config c = from_json({{"protocol", {{"gaze_schedule", {{{"trial", 5}, {"yaw", 0.9}, {"pitch", -0.2}}}}}}});
  const auto s = c.schedule();
  EXPECT_EQ(s[4].gaze.yaw, 0.9);
  EXPECT_EQ(s[4].gaze.pitch, -0.2);
  EXPECT_EQ(s[3].gaze.yaw, -0.47);
}

TEST(Config, AgentFactoryKinds) {
  const Config c;
  EXPECT_EQ(agent_factory(c, "model")(0, 1)->kind(), "model");
  EXPECT_NO_THROW(agent_factory(c, "mid_switch")(0, 1));
  EXPECT_THROW(agent_factory(c, "robot"), cl::ArgumentError);
}

TEST(Config, ServicePrecedence) {
  Config c;
  c.service.port = 9000;
  c.service.data_dir = "from_config";
  ::unsetenv("CONSENSUS_LAB_PORT");
  ::unsetenv("CONSENSUS_LAB_DATA_DIR");
  EXPECT_EQ(cl::cli::resolve_service(c, {}).port, 9000);
  ::setenv("CONSENSUS_LAB_PORT", "9100", 1);
  ::setenv("CONSENSUS_LAB_DATA_DIR", "from_env", 1);
  auto s = cl::cli::resolve_service(c, {});
  EXPECT_EQ(s.port, 9100);
  EXPECT_EQ(s.data_dir, "from_env");
  cl::cli::ServeOptions o;
  o.port = 9200;
  o.data_dir = "from_flag";
  s = cl::cli::resolve_service(c, o);
  EXPECT_EQ(s.port, 9200);
  EXPECT_EQ(s.data_dir, "from_flag");
  ::setenv("CONSENSUS_LAB_PORT", "eighty", 1);
  EXPECT_THROW(cl::cli::resolve_service(c, {}), cl::ConfigError);
  ::unsetenv("CONSENSUS_LAB_PORT");
  ::unsetenv("CONSENSUS_LAB_DATA_DIR");
}
