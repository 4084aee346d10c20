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

#include "consensus_lab/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "consensus_lab/analysis.hpp"
#include "consensus_lab/errors.hpp"
#include "consensus_lab/server.hpp"
#include "consensus_lab/session_log.hpp"
#include "consensus_lab/stats.hpp"

namespace consensus_lab::cli {

using nlohmann::json;

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json table_json(const stats::ContingencyTable& t) {
  json rows = json::array();
  for (const auto& r : t) rows.push_back(json(r));
  return rows;
}

}  // namespace

int cmd_sweep(const config::Config& c, const SweepOptions& o) {
  analysis::SweepSettings s = c.sweep;
  if (o.resolution) s.resolution = *o.resolution;
  s.validate();
  opinion::validate_dissensus(c.sim.robot, c.sim.adjacency);
  ensure_dir(o.out);

  const auto t0 = std::chrono::steady_clock::now();
  const analysis::SweepResult r = o.serial ? analysis::sweep_serial(c.sim.robot, c.sim.adjacency, s)
                                           : analysis::sweep(c.sim.robot, c.sim.adjacency, s);
  const double elapsed = seconds_since(t0);
  const analysis::SquareReport rep = analysis::verify_consensus_square(r, c.sim.robot.attention);

  std::ostringstream csv;
  analysis::write_sweep_csv(csv, r);
  write_text(o.out / "sweep.csv", csv.str());

  json mism = json::array();
  const double u = c.sim.robot.attention;
  for (const auto& cell : r.cells) {
    const bool expect = std::abs(cell.b_r) > u && std::abs(cell.b_h) > u &&
                        (cell.b_r > 0) == (cell.b_h > 0);
    const bool near = std::abs(std::abs(cell.b_r) - u) <= r.step() ||
                      std::abs(std::abs(cell.b_h) - u) <= r.step();
    if (!near && expect != (cell.label == analysis::Label::Consensus)) {
      mism.push_back({{"b_r", cell.b_r}, {"b_h", cell.b_h}, {"z_r", cell.z_r}, {"z_h", cell.z_h}});
    }
  }
  const json report = {{"resolution", r.resolution},
                       {"lo", r.lo},
                       {"hi", r.hi},
                       {"attention", u},
                       {"checked", rep.checked},
                       {"excluded", rep.excluded},
                       {"mismatches", rep.mismatches},
                       {"indeterminate", rep.indeterminate},
                       {"mismatch_fraction", rep.mismatch_fraction},
                       {"pass", rep.pass()},
                       {"mismatched_cells", mism},
                       {"elapsed_s", elapsed}};
  write_text(o.out / "sweep_report.json", report.dump(2) + "\n");
  spdlog::info("sweep {}x{} in {:.2f} s: checked {}, excluded {}, mismatches {}", r.resolution,
               r.resolution, elapsed, rep.checked, rep.excluded, rep.mismatches);
  std::cout << "mismatches " << rep.mismatches << " of " << rep.checked << " ("
            << rep.mismatch_fraction << ")\n";
  return rep.pass() ? kExitOk : kExitFailure;
}

int cmd_equilibria(const config::Config& c, const EquilibriaOptions& o) {
  ensure_dir(o.out);
  const analysis::EquilibriumReport eq =
      analysis::find_equilibria(c.sim.robot, c.sim.adjacency, o.b_r, o.b_h, c.newton);
  const analysis::NullclineField field{c.sim.robot, c.sim.adjacency, o.b_r, o.b_h};
  const auto lines = analysis::nullcline_zero_contours(field, c.contours);
  const auto crossings = analysis::contour_intersections(field, lines);

  std::ostringstream eq_csv, ct_csv;
  analysis::write_equilibria_csv(eq_csv, eq);
  analysis::write_contours_csv(ct_csv, lines);
  write_text(o.out / "equilibria.csv", eq_csv.str());
  write_text(o.out / "contours.csv", ct_csv.str());

  json roots = json::array();
  for (const auto& p : eq.points) {
    json eig = json::array();
    for (const auto& l : p.jacobian.eigenvalues) eig.push_back({l.real(), l.imag()});
    roots.push_back({{"z_r", p.z_r},
                     {"z_h", p.z_h},
                     {"stability", std::string(analysis::to_string(p.stability))},
                     {"residual", p.residual},
                     {"eigenvalues", eig}});
  }
  json cross = json::array();
  for (const Vec2& v : crossings) cross.push_back({v.x, v.y});
  const json report = {{"b_r", o.b_r},
                       {"b_h", o.b_h},
                       {"roots", roots},
                       {"contour_polylines", lines.size()},
                       {"contour_crossings", cross},
                       {"counts_agree", crossings.size() == eq.points.size()}};
  write_text(o.out / "equilibria_report.json", report.dump(2) + "\n");
  std::cout << eq.points.size() << " equilibria, " << crossings.size() << " contour crossings\n";
  return kExitOk;
}

int cmd_protocol(const config::Config& c, const ProtocolOptions& o) {
  if (o.participants < 1) throw ArgumentError("--participants must be >= 1");
  const protocol::AgentFactory factory = config::agent_factory(c, o.human);
  const auto schedule = c.schedule();
  ensure_dir(o.out);

  const auto t0 = std::chrono::steady_clock::now();
  const auto sessions =
      o.serial ? protocol::run_session_serial(factory, o.participants, o.seed, c.sim, schedule)
               : protocol::run_session(factory, o.participants, o.seed, c.sim, schedule);
  spdlog::info("{} participants in {:.2f} s", o.participants, seconds_since(t0));

  for (const auto& s : sessions) {
    session_log::write_session(o.out, session_log::session_stem(s.participant_id), s, o.series);
  }
  const auto participants = stats::outcomes_of(sessions);
  const stats::OutcomeTable table = stats::outcome_frequencies(participants);
  std::ostringstream csv;
  csv << "trial,n,C,CH,D,DH,pct_C,pct_CH,pct_D,pct_DH\n";
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    const auto& k = table.counts[i];
    csv << (i + 1) << ',' << table.n_participants << ',' << k[0] << ',' << k[1] << ',' << k[2]
        << ',' << k[3];
    for (auto oc : {protocol::Outcome::C, protocol::Outcome::CH, protocol::Outcome::D,
                    protocol::Outcome::DH}) {
      csv << ',' << table.percent(static_cast<int>(i), oc);
    }
    csv << '\n';
  }
  write_text(o.out / "outcomes.csv", csv.str());

  json totals = json::array();
  for (const auto& s : sessions) totals.push_back(s.total_score);
  const json summary = {{"participants", o.participants},
                        {"human", o.human},
                        {"seed", o.seed},
                        {"total_scores", totals}};
  write_text(o.out / "summary.json", summary.dump(2) + "\n");
  std::cout << csv.str();
  return kExitOk;
}

json stats_summary(const std::filesystem::path& logs) {
  const session_log::LoadedLogs loaded = session_log::read_logs(logs);
  if (loaded.participants.empty()) {
    throw ArgumentError("no complete sessions under " + logs.string());
  }
  if (loaded.skipped_lines > 0) spdlog::warn("skipped {} malformed log lines", loaded.skipped_lines);
  if (loaded.incomplete_sessions > 0) {
    spdlog::warn("ignored {} incomplete sessions", loaded.incomplete_sessions);
  }
  const stats::OutcomeTable table = stats::outcome_frequencies(loaded.participants);
  json per_trial = json::array();
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    const auto& k = table.counts[i];
    per_trial.push_back({{"trial", i + 1}, {"C", k[0]}, {"CH", k[1]}, {"D", k[2]}, {"DH", k[3]}});
  }
  const auto control = stats::majority_category(loaded.participants, stats::Phase::Control);
  const auto experiment = stats::majority_category(loaded.participants, stats::Phase::Experiment);
  const stats::ContingencyTable ct = stats::contingency(control, experiment);
  json sm;
  try {
    const stats::TestResult r = stats::stuart_maxwell(ct);
    sm = {{"statistic", r.statistic}, {"df", r.df}, {"p", r.p}};
  } catch (const UndefinedTestError& e) {
    sm = {{"statistic", nullptr}, {"df", nullptr}, {"p", nullptr}, {"reason", e.what()}};
  }
  return {{"participants", table.n_participants},
          {"files", loaded.files},
          {"skipped_lines", loaded.skipped_lines},
          {"incomplete_sessions", loaded.incomplete_sessions},
          {"per_trial", per_trial},
          {"categories", {"C", "CH", "D", "DH"}},
          {"contingency", table_json(ct)},
          {"stuart_maxwell", sm}};
}

int cmd_stats(const StatsOptions& o) {
  const json summary = stats_summary(o.logs);
  if (o.out) write_text(*o.out, summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

config::ServiceSettings resolve_service(const config::Config& c, const ServeOptions& o) {
  config::ServiceSettings s = c.service;
  if (const char* env = std::getenv("CONSENSUS_LAB_PORT"); env && *env) {
    try {
      std::size_t used = 0;
      s.port = std::stoi(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(std::string("CONSENSUS_LAB_PORT is not a port number: ") + env);
    }
  }
  if (const char* env = std::getenv("CONSENSUS_LAB_DATA_DIR"); env && *env) s.data_dir = env;
  if (o.port) s.port = *o.port;
  if (o.data_dir) s.data_dir = *o.data_dir;
  if (o.static_dir) s.static_dir = *o.static_dir;
  if (s.port < 0 || s.port > 65535) throw ConfigError("port out of range");
  return s;
}

int cmd_serve(const config::Config& c, const ServeOptions& o) {
  const config::ServiceSettings s = resolve_service(c, o);
  service::ServerOptions so;
  so.port = s.port;
  so.max_sessions = s.max_sessions;
  so.data_dir = s.data_dir;
  so.static_dir = s.static_dir;
  so.session.sim = c.sim;
  so.session.schedule = c.schedule();
  so.session.inactivity_timeout = s.inactivity_timeout;
  std::unique_ptr<service::Server> server;
  try {
    server = std::make_unique<service::Server>(so);
  } catch (const std::system_error& e) {
    spdlog::error("cannot listen on port {}: {}", s.port, e.what());
    return kExitUsage;
  }
  std::cout << "listening on port " << server->port() << std::endl;
  server->run(true);
  return kExitOk;
}

}  // namespace consensus_lab::cli
