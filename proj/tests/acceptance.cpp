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

// Acceptance run: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "consensus_lab/analysis.hpp"
#include "consensus_lab/bias_control.hpp"
#include "consensus_lab/commands.hpp"
#include "consensus_lab/live_session.hpp"
#include "consensus_lab/observer.hpp"
#include "consensus_lab/protocol.hpp"
#include "consensus_lab/stats.hpp"
#include "support.hpp"

namespace cl = consensus_lab;
using cl::bias::ConsensusOption;
using cl::protocol::Outcome;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& title, const std::string& detail) {
  std::printf("%s  criterion %d  %s: %s\n", ok ? "PASS" : "FAIL", n, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const cl::opinion::AgentParams kP;
const cl::opinion::Adjacency kAdj;

void consensus_square() {
  cl::analysis::SweepSettings s;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cl::analysis::sweep(kP, kAdj, s);
  const double secs = seconds_since(t0);
  const auto rep = cl::analysis::verify_consensus_square(r, kP.attention);
  const bool ok = s.resolution == 121 && rep.mismatches == 0 && secs < 60.0;
  report(1, ok, "consensus square 121x121",
         fmt("checked %d excluded %d mismatches %d fraction %.3g in %.1f s", rep.checked, rep.excluded,
             rep.mismatches, rep.mismatch_fraction, secs));
}

void equilibrium_count() {
  bool ok = true;
  std::string detail;
  for (double sign : {1.0, -1.0}) {
    const double b = sign * (kP.attention + 1.0);
    const auto eq = cl::analysis::find_equilibria(kP, kAdj, b, b);
    const cl::analysis::NullclineField f{kP, kAdj, b, b};
    const auto crossings =
        cl::analysis::contour_intersections(f, cl::analysis::nullcline_zero_contours(f, {}));
    bool good = eq.points.size() == 1 && crossings.size() == 1;
    if (!eq.points.empty()) {
      const auto& e = eq.points[0];
      good = good && e.residual < 1e-8 && e.jacobian.eigenvalues[0].real() < 0 &&
             e.jacobian.eigenvalues[1].real() < 0;
      detail += fmt("b=%+.2f: %zu root (%.6f, %.6f), %zu crossing; ", b, eq.points.size(), e.z_r, e.z_h,
                    crossings.size());
    }
    ok = ok && good;
  }
  report(2, ok, "single consensus equilibrium", detail);
}

bool origin_grows(double u) {
  cl::opinion::AgentParams p = kP;
  p.attention = u;
  cl::opinion::OpinionState s{1e-4, -1e-4, 0, 0, 0};
  for (int k = 0; k < 300; ++k) s = cl::opinion::step(s, p, p, kAdj, 0.01);
  return std::hypot(s.z_robot, s.z_human) > std::hypot(1e-4, 1e-4);
}

void thresholds() {
  const double ud = cl::opinion::critical_attention(kP, -1.0);
  const auto j = cl::opinion::jacobian(0, 0, kP, kAdj);
  cl::opinion::AgentParams low = kP;
  low.attention = 1.0;
  const auto jl = cl::opinion::jacobian(0, 0, low, kAdj);
  const double e0 = j.eigenvalues[0].real(), e1 = j.eigenvalues[1].real();
  const bool ok = std::abs(ud - 1.24224) < 1e-5 && std::abs(e0 + 27.81) < 0.01 &&
                  std::abs(e1 - 8.03) < 0.01 && jl.stable && !j.stable && !origin_grows(1.0) &&
                  origin_grows(2.24);
  report(3, ok, "threshold arithmetic",
         fmt("u_d*=%.6f eig={%.3f, %.3f} stable(u=1)=%d stable(u=2.24)=%d", ud, e0, e1, jl.stable, j.stable));
}

void dissensus_guarantee() {
  testkit::Gen g(2024);
  int runs = 0, split = 0;
  for (auto k : {cl::human::ScriptKind::Direct, cl::human::ScriptKind::MidSwitch,
                 cl::human::ScriptKind::MultiSwitch, cl::human::ScriptKind::EarlyStrategicSwitch}) {
    for (int i = 0; i < 20; ++i) {
      const auto initial = g.coin() ? ConsensusOption::Red : ConsensusOption::Blue;
      cl::human::ScriptedHuman h(
          cl::human::make_script(k, initial, g.uniform(200, 300), g.uniform(0.02, 0.3)), false);
      const auto r = cl::protocol::run_trial(cl::protocol::trial_config(1 + i % 3), {}, h);
      ++runs;
      if (r.human_press && *r.human_press != r.robot_press) ++split;
    }
  }
  report(4, split == runs, "dissensus in trials 1-3", fmt("%d/%d runs split", split, runs));
}

void bias_consensus() {
  const cl::protocol::SimulationParams sim;
  const cl::human::CohortParams cohort;
  // b* is the critical bias u; gains.b_star is the controller's drive target above it
  const double b_crit = sim.robot.attention;
  int good = 0, consensus = 0, strong = 0, target = 0, frozen = 0;
  for (int i = 0; i < 100; ++i) {
    const auto cfg = cl::protocol::trial_config(5 + i % 4);
    cl::human::ModelHumanAgent h(cohort, cl::protocol::participant_seed(5, i));
    const auto r = cl::protocol::run_trial(cfg, sim, h);
    const bool c = r.outcome == Outcome::C || r.outcome == Outcome::CH;
    const double b = r.samples.back().b_robot;
    const bool s = std::abs(b) >= b_crit && cl::bias::sgn(b) == cl::bias::target_sign(*cfg.option);
    bool f = true;
    for (const auto& smp : r.samples) {
      if (smp.t > r.last_bias_update_t + sim.dt * 1.5 && smp.b_robot != b) f = false;
    }
    consensus += c;
    strong += s;
    target += std::abs(b) >= sim.gains.b_star;
    frozen += f;
    good += c && s && f;
  }
  report(5, good == 100, "bias-driven consensus in trials 5-8",
         fmt("consensus %d/100, |b_r|>=b*=u=%.2f with matching sign %d/100 (drive target %.2f reached %d/100), "
             "bias frozen after exit %d/100",
             consensus, b_crit, strong, sim.gains.b_star, target, frozen));
}

std::vector<cl::protocol::SessionRecord> cohort() {
  const cl::human::CohortParams cp;
  const cl::protocol::AgentFactory f = [cp](int, std::uint64_t seed) {
    return std::make_unique<cl::human::ModelHumanAgent>(cp, seed);
  };
  return cl::protocol::run_session(f, 51, 1, {});
}

void cohort_shape(const std::vector<cl::protocol::SessionRecord>& sessions) {
  const auto t = cl::stats::outcome_frequencies(cl::stats::outcomes_of(sessions));
  double d13 = 0;
  for (int i = 0; i < 3; ++i) d13 += t.percent(i, Outcome::D) / 3.0;
  const double ch4 = t.percent(3, Outcome::CH);
  const double c8 = t.percent(7, Outcome::C) + t.percent(7, Outcome::CH);
  const double d8 = t.percent(7, Outcome::D);
  const bool trial4_minimal = cl::protocol::trial_config(4).gaze.level == cl::human::GazeLevel::Minimal;
  const bool ok = trial4_minimal && d13 > 60 && ch4 > 25 && c8 > 85 && d8 < 10;
  report(6, ok, "cohort shape (51 model humans)",
         fmt("trials 1-3 D %.1f%%, trial 4 CH %.1f%%, trial 8 C+CH %.1f%% D %.1f%%", d13, ch4, c8, d8));
}

void stuart_maxwell(const std::vector<cl::protocol::SessionRecord>& sessions) {
  const auto ps = cl::stats::outcomes_of(sessions);
  const auto ct = cl::stats::contingency(cl::stats::majority_category(ps, cl::stats::Phase::Control),
                                         cl::stats::majority_category(ps, cl::stats::Phase::Experiment));
  double p = 1.0, stat = 0.0;
  try {
    const auto r = cl::stats::stuart_maxwell(ct);
    p = r.p;
    stat = r.statistic;
  } catch (const std::exception&) {
  }
  testkit::Gen g(7);
  double worst_sym = 0, worst_ref = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::vector<double>> sym(4, std::vector<double>(4)), rnd(4, std::vector<double>(4));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (b >= a) sym[a][b] = sym[b][a] = g.integer(1, 30);
        rnd[a][b] = g.integer(1, 30);
      }
    worst_sym = std::max(worst_sym, std::abs(cl::stats::stuart_maxwell(sym).statistic));
    const double mine = cl::stats::stuart_maxwell(rnd).statistic;
    worst_ref = std::max(worst_ref, std::abs(mine - testkit::ref::stuart_maxwell(rnd).first));
  }
  const double mcnemar = cl::stats::stuart_maxwell(std::vector<std::vector<double>>{{10, 6}, {2, 10}}).statistic;
  const bool ok = p < 0.001 && worst_sym == 0.0 && worst_ref < 1e-9 && mcnemar == 2.0;
  report(7, ok, "Stuart-Maxwell",
         fmt("cohort stat %.3f p %.3g; symmetric max %.1e; oracle max diff %.1e; McNemar %.17g", stat, p,
             worst_sym, worst_ref, mcnemar));
}

void unit_identities() {
  const cl::observer::ObserverParams op;
  const double z90 = cl::observer::observe_opinion(M_PI / 2, 1.0, op);
  const double z0 = cl::observer::observe_opinion(0.0, 1.0, op);
  testkit::Gen g(8);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    cl::bias::BiasGains gains;
    gains.sigma_mag = g.uniform(0, 1);
    gains.K = g.uniform(0.1, 50);
    gains.b_star = g.uniform(2.24, 6);
    const double b = g.uniform(-8, 8), z = g.uniform(-3, 3);
    const int s = g.integer(-1, 1);
    const auto o = g.coin() ? ConsensusOption::Red : ConsensusOption::Blue;
    worst = std::max(worst, std::abs(cl::bias::bias_rate(b, z, s, o, gains) -
                                     cl::bias::bias_rate_factored_form(b, z, s, o, gains)));
  }
  cl::opinion::OpinionState a{0.3, -0.1, 0.5, -1.0, 0}, h = a;
  for (int k = 0; k < 100; ++k) a = cl::opinion::step(a, kP, kP, kAdj, 0.01);
  for (int k = 0; k < 200; ++k) h = cl::opinion::step(h, kP, kP, kAdj, 0.005);
  const double halving = std::max(std::abs(a.z_robot - h.z_robot), std::abs(a.z_human - h.z_human));
  const bool ok = std::abs(z90) < 1e-12 && std::abs(z0 - 7.2412) < 1e-4 && worst <= 1e-12 && halving < 1e-8;
  report(8, ok, "observer and bias identities",
         fmt("zhat(pi/2)=%.1e zhat(0,1)=%.6f bias forms max diff %.1e step halving %.1e", z90, z0, worst,
             halving));
}

// Records cursor frames while a model human plays live; replays them into a fresh session.
std::vector<std::string> trial_ends(const std::vector<std::vector<cl::wire::Cursor>>& frames,
                                    std::vector<std::vector<cl::wire::Cursor>>* record) {
  cl::service::SessionOptions o;
  for (auto& c : o.schedule) c.countdown = 0.0;
  cl::service::LiveSession s(0, o);
  cl::human::ModelHumanAgent h({}, 99);
  std::vector<std::string> ends;
  for (std::size_t trial = 0; trial < o.schedule.size(); ++trial) {
    s.handle(cl::wire::Ready{});
    if (record) {
      record->emplace_back();
      h.begin_trial(cl::protocol::make_context(o.schedule[trial], o.sim));
    }
    for (std::size_t k = 0; s.phase() == cl::service::Phase::Running; ++k) {
      cl::wire::Cursor c;
      if (record) {
        c = {k * o.sim.dt, h.position().x, h.position().y};
        record->back().push_back(c);
      } else {
        c = frames.at(trial).at(std::min(k, frames[trial].size() - 1));
      }
      s.handle(c);
      for (const auto& m : s.tick())
        if (m.at("type") == "TrialEnd") ends.push_back(m.dump());
      if (record && s.phase() == cl::service::Phase::Running) {
        h.advance(k * o.sim.dt, o.sim.dt, {0.0, {}});
      }
    }
  }
  return ends;
}

void determinism() {
  const auto dir = testkit::scratch_dir("acceptance_determinism");
  const cl::config::Config c;
  cl::cli::ProtocolOptions o;
  o.participants = 51;
  o.seed = 1;
  o.out = dir / "a";
  cl::cli::cmd_protocol(c, o);
  o.out = dir / "b";
  cl::cli::cmd_protocol(c, o);
  int files = 0, same = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "a")) {
    ++files;
    same += testkit::read_file(e.path()) == testkit::read_file(dir / "b" / e.path().filename());
  }
  std::vector<std::vector<cl::wire::Cursor>> frames;
  const auto live = trial_ends({}, &frames);
  const auto replay = trial_ends(frames, nullptr);
  const bool ok = files > 0 && same == files && live.size() == 8 && live == replay;
  report(9, ok, "determinism",
         fmt("%d/%d log files byte-identical; replay TrialEnd %zu/%zu identical", same, files,
             live == replay ? live.size() : 0, live.size()));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{consensus_square, equilibrium_count, thresholds,
                                                  dissensus_guarantee, bias_consensus};
  for (const auto& f : checks) f();
  const auto sessions = cohort();
  cohort_shape(sessions);
  stuart_maxwell(sessions);
  unit_identities();
  determinism();
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
