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

// Bias-plane sweep, nullcline zero contours and equilibrium finding for the
// coupled pair.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consensus_lab/geometry.hpp"
#include "consensus_lab/opinion_core.hpp"

namespace consensus_lab::analysis {

enum class Label { Consensus, Dissensus };
std::string_view to_string(Label l);

struct SweepSettings {
  double lo = -6.0;
  double hi = 6.0;
  int resolution = 121;  // cells per axis
  double t_final = 50.0;
  double dt = 0.01;
  std::optional<Vec2> z0;  // (z_r, z_h); default: unbiased dissensus equilibrium
  double settle_tol = 1e-4;

  void validate() const;
};

struct SweepCell {
  double b_r = 0.0;
  double b_h = 0.0;
  double z_r = 0.0;
  double z_h = 0.0;
  Label label = Label::Dissensus;
  bool indeterminate = false;  // max |z'| > settle_tol at t_final
};

struct SweepResult {
  int resolution = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<SweepCell> cells;  // row-major: index = i_r * resolution + i_h

  double step() const { return (hi - lo) / (resolution - 1); }
  double axis(int i) const { return lo + i * step(); }
  const SweepCell& at(int i_r, int i_h) const { return cells[i_r * resolution + i_h]; }
  int indeterminate_count() const;
};

// Stable opposite-signed equilibrium with z_r > 0 and zero biases.
Vec2 unbiased_dissensus_equilibrium(const opinion::AgentParams& p, const opinion::Adjacency& adj);

// Integrates one bias pair from z0 to t_final.
SweepCell classify_cell(double b_r, double b_h, const opinion::AgentParams& p,
                        const opinion::Adjacency& adj, const SweepSettings& s, Vec2 z0);

// Requires a dissensus base configuration (gamma < 0, u > u_d*).
SweepResult sweep(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                  const SweepSettings& s);
SweepResult sweep_serial(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                         const SweepSettings& s);

struct SquareReport {
  int checked = 0;
  int excluded = 0;  // within one grid step of |b_r| = u or |b_h| = u
  int mismatches = 0;
  int indeterminate = 0;
  double mismatch_fraction = 0.0;
  bool pass() const { return mismatches == 0; }
};

// Consensus iff |b_r| > u, |b_h| > u and equal signs, away from the boundary.
SquareReport verify_consensus_square(const SweepResult& r, double u);

// Right-hand sides of the two opinion equations at fixed biases.
struct NullclineField {
  opinion::AgentParams params;
  opinion::Adjacency adj;
  double b_r = 0.0;
  double b_h = 0.0;

  double delta1(double z_r, double z_h) const;
  double delta2(double z_r, double z_h) const;
};

struct Polyline {
  int field = 1;  // 1 or 2
  std::vector<Vec2> points;  // (z_r, z_h)
};

struct ContourSettings {
  double lo = -3.0;
  double hi = 3.0;
  int resolution = 401;  // grid points per axis
};

std::vector<Polyline> nullcline_zero_contours(const NullclineField& f, const ContourSettings& s);

// Crossings of the two contour families, Newton-polished and deduplicated.
std::vector<Vec2> contour_intersections(const NullclineField& f, const std::vector<Polyline>& lines);

enum class Stability { Stable, Unstable, Saddle };
std::string_view to_string(Stability s);

struct Equilibrium {
  double z_r = 0.0;
  double z_h = 0.0;
  Stability stability = Stability::Stable;
  double residual = 0.0;
  opinion::JacobianInfo jacobian;
};

struct EquilibriumReport {
  double b_r = 0.0;
  double b_h = 0.0;
  std::vector<Equilibrium> points;  // sorted by (z_r, z_h)
};

struct NewtonSettings {
  int seeds_per_axis = 20;
  double lo = -3.0;
  double hi = 3.0;
  int max_iter = 100;
  double tol = 1e-12;
  double dedup = 1e-4;
};

// Damped Newton from a seed grid. Throws NumericalError when no root is found.
EquilibriumReport find_equilibria(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                                  double b_r, double b_h, const NewtonSettings& s = {});

// Newton polish of a single point; nullopt on divergence.
std::optional<Vec2> newton_polish(const NullclineField& f, Vec2 z0, int max_iter = 100,
                                  double tol = 1e-12);

void write_sweep_csv(std::ostream& out, const SweepResult& r);
void write_contours_csv(std::ostream& out, const std::vector<Polyline>& lines);
void write_equilibria_csv(std::ostream& out, const EquilibriumReport& r);

}  // namespace consensus_lab::analysis
