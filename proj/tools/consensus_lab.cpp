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

// consensus-lab: sweeps, equilibria, protocol simulations, statistics and
// the live session host.

#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "consensus_lab/commands.hpp"
#include "consensus_lab/errors.hpp"

namespace cl = consensus_lab;

int main(int argc, char** argv) {
  CLI::App app{"Human-robot opinion dynamics lab"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", quiet, "Only errors");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  cl::cli::SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Bias-plane sweep and consensus-square check");
  c_sweep->add_option("--out", sweep.out, "Output directory");
  c_sweep->add_option("--resolution", sweep.resolution, "Cells per axis")->check(CLI::Range(25, 2001));
  c_sweep->add_flag("--serial", sweep.serial, "Single-threaded reference kernel");

  cl::cli::EquilibriaOptions eq;
  auto* c_eq = app.add_subcommand("equilibria", "Equilibria and nullcline contours at one bias pair");
  c_eq->add_option("--br", eq.b_r, "Robot bias")->required();
  c_eq->add_option("--bh", eq.b_h, "Human bias")->required();
  c_eq->add_option("--out", eq.out, "Output directory");

  cl::cli::ProtocolOptions proto;
  auto* c_proto = app.add_subcommand("protocol", "Simulate 8-trial sessions");
  c_proto->add_option("--participants,-n", proto.participants, "Participants")
      ->check(CLI::PositiveNumber);
  c_proto->add_option("--human", proto.human,
                      "model, direct, mid_switch, multi_switch or early_switch")
      ->check(CLI::IsMember({"model", "direct", "mid_switch", "multi_switch", "early_switch"}));
  c_proto->add_option("--seed", proto.seed, "Session seed");
  c_proto->add_option("--out", proto.out, "Output directory");
  c_proto->add_flag("!--no-series", proto.series, "Omit per-tick series from logs");
  c_proto->add_flag("--serial", proto.serial, "Run participants sequentially");

  cl::cli::StatsOptions st;
  auto* c_stats = app.add_subcommand("stats", "Outcome tables and tests over session logs");
  c_stats->add_option("--logs", st.logs, "Directory of session logs")->required();
  c_stats->add_option("--out", st.out, "Summary JSON path");

  cl::cli::ServeOptions serve;
  auto* c_serve = app.add_subcommand("serve", "Host live sessions over websocket");
  c_serve->add_option("--port", serve.port, "Listen port")->check(CLI::Range(0, 65535));
  c_serve->add_option("--data-dir", serve.data_dir, "Session log directory");
  c_serve->add_option("--static-dir", serve.static_dir, "UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cl::cli::kExitUsage;
  }

  auto logger = spdlog::stderr_color_mt("consensus-lab");
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    cl::config::Config cfg = config_path.empty() ? cl::config::Config{} : cl::config::load(config_path);
    cfg.validate();
    if (*c_sweep) return cl::cli::cmd_sweep(cfg, sweep);
    if (*c_eq) return cl::cli::cmd_equilibria(cfg, eq);
    if (*c_proto) return cl::cli::cmd_protocol(cfg, proto);
    if (*c_stats) return cl::cli::cmd_stats(st);
    if (*c_serve) return cl::cli::cmd_serve(cfg, serve);
  } catch (const cl::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return cl::cli::kExitUsage;
  } catch (const cl::ArgumentError& e) {
    spdlog::error("{}", e.what());
    return cl::cli::kExitUsage;
  } catch (const cl::DomainError& e) {
    spdlog::error("{}", e.what());
    return cl::cli::kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return cl::cli::kExitFailure;
  }
  return cl::cli::kExitUsage;
}
