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

#include "consensus_lab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::analysis {
namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

double max_abs(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

Vec2 residual(const NullclineField& f, Vec2 z) { return {f.delta1(z.x, z.y), f.delta2(z.x, z.y)}; }

// Marching-squares segment with endpoints on grid edges.
struct Segment {
  long edge_a;
  long edge_b;
  Vec2 a;
  Vec2 b;
  long cell;
};

struct Grid {
  int n;
  double lo;
  double h;
  std::vector<double> v;  // v[i * n + j] at (z_r = lo + i h, z_h = lo + j h)

  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }
  double x(int i) const { return lo + i * h; }
};

Grid sample(const NullclineField& f, int field, const ContourSettings& s) {
  Grid g{s.resolution, s.lo, (s.hi - s.lo) / (s.resolution - 1), {}};
  g.v.resize(static_cast<std::size_t>(g.n) * g.n);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double zr = g.x(i), zh = g.x(j);
      g.v[static_cast<std::size_t>(i) * g.n + j] = field == 1 ? f.delta1(zr, zh) : f.delta2(zr, zh);
    }
  }
  return g;
}

std::vector<Segment> march(const Grid& g) {
  std::vector<Segment> segs;
  const long n = g.n;
  auto h_edge = [n](int i, int j) { return 2 * (static_cast<long>(i) * n + j); };
  auto v_edge = [n](int i, int j) { return 2 * (static_cast<long>(i) * n + j) + 1; };
  for (int i = 0; i + 1 < g.n; ++i) {
    for (int j = 0; j + 1 < g.n; ++j) {
      // Corners c0 (i,j), c1 (i+1,j), c2 (i+1,j+1), c3 (i,j+1) in (z_r, z_h).
      const std::array<double, 4> c{g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
      const std::array<Vec2, 4> p{Vec2{g.x(i), g.x(j)}, Vec2{g.x(i + 1), g.x(j)},
                                  Vec2{g.x(i + 1), g.x(j + 1)}, Vec2{g.x(i), g.x(j + 1)}};
      std::array<bool, 4> in{};
      for (int k = 0; k < 4; ++k) in[k] = c[k] >= 0.0;
      // Edges e0 c0-c1, e1 c1-c2, e2 c3-c2, e3 c0-c3.
      const std::array<std::array<int, 2>, 4> ends{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
      const std::array<long, 4> ids{h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      std::array<Vec2, 4> cross{};
      std::array<bool, 4> has{};
      int count = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = ends[e][0], b = ends[e][1];
        if (in[a] != in[b]) {
          const double t = c[a] / (c[a] - c[b]);
          cross[e] = p[a] + t * (p[b] - p[a]);
          has[e] = true;
          ++count;
        }
      }
      const long cell = static_cast<long>(i) * n + j;
      auto add = [&](int e1, int e2) { segs.push_back({ids[e1], ids[e2], cross[e1], cross[e2], cell}); };
      if (count == 2) {
        int first = -1;
        for (int e = 0; e < 4; ++e) {
          if (!has[e]) continue;
          if (first < 0) {
            first = e;
          } else {
            add(first, e);
          }
        }
      } else if (count == 4) {
        const double center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        if ((center >= 0.0) == in[0]) {
          add(0, 1);
          add(2, 3);
        } else {
          add(0, 3);
          add(1, 2);
        }
      }
    }
  }
  return segs;
}

std::vector<Polyline> chain(const std::vector<Segment>& segs, int field) {
  std::unordered_map<long, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    by_edge[segs[k].edge_a].push_back(k);
    by_edge[segs[k].edge_b].push_back(k);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;

  auto walk = [&](std::size_t start, long start_edge) {
    Polyline pl;
    pl.field = field;
    long edge = start_edge;
    std::size_t cur = start;
    pl.points.push_back(segs[cur].edge_a == edge ? segs[cur].a : segs[cur].b);
    while (true) {
      used[cur] = true;
      const Segment& s = segs[cur];
      const bool forward = s.edge_a == edge;
      pl.points.push_back(forward ? s.b : s.a);
      edge = forward ? s.edge_b : s.edge_a;
      std::size_t next = segs.size();
      for (std::size_t cand : by_edge[edge]) {
        if (!used[cand]) {
          next = cand;
          break;
        }
      }
      if (next == segs.size()) break;
      cur = next;
    }
    out.push_back(std::move(pl));
  };

  // Open polylines start at edges used once; loops afterwards.
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (used[k]) continue;
    if (by_edge[segs[k].edge_a].size() == 1) {
      walk(k, segs[k].edge_a);
    } else if (by_edge[segs[k].edge_b].size() == 1) {
      walk(k, segs[k].edge_b);
    }
  }
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!used[k]) walk(k, segs[k].edge_a);
  }
  return out;
}

// Intersection of segments p1-p2 and q1-q2, endpoints included.
std::optional<Vec2> segment_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const Vec2 r = p2 - p1, s = q2 - q1;
  const double den = r.x * s.y - r.y * s.x;
  if (den == 0.0) return std::nullopt;
  const Vec2 qp = q1 - p1;
  const double t = (qp.x * s.y - qp.y * s.x) / den;
  const double u = (qp.x * r.y - qp.y * r.x) / den;
  constexpr double e = 1e-12;
  if (t < -e || t > 1.0 + e || u < -e || u > 1.0 + e) return std::nullopt;
  return p1 + t * r;
}

void dedup_push(std::vector<Vec2>& pts, Vec2 z, double tol) {
  for (const Vec2& q : pts) {
    if (max_abs(q - z) <= tol) return;
  }
  pts.push_back(z);
}

Stability classify(const opinion::JacobianInfo& j) {
  const double a = j.eigenvalues[0].real(), b = j.eigenvalues[1].real();
  if (a < 0.0 && b < 0.0) return Stability::Stable;
  if (a > 0.0 && b > 0.0) return Stability::Unstable;
  return Stability::Saddle;
}

SweepResult sweep_impl(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                       const SweepSettings& s, bool parallel) {
  s.validate();
  opinion::validate_dissensus(p, adj);
  const Vec2 z0 = s.z0.value_or(unbiased_dissensus_equilibrium(p, adj));
  SweepResult r;
  r.resolution = s.resolution;
  r.lo = s.lo;
  r.hi = s.hi;
  const int n = s.resolution;
  r.cells.resize(static_cast<std::size_t>(n) * n);
  const long total = static_cast<long>(n) * n;
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long k = 0; k < total; ++k) {
      const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
      r.cells[static_cast<std::size_t>(k)] = classify_cell(r.axis(i), r.axis(j), p, adj, s, z0);
    }
  } else {
    for (long k = 0; k < total; ++k) {
      const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
      r.cells[static_cast<std::size_t>(k)] = classify_cell(r.axis(i), r.axis(j), p, adj, s, z0);
    }
  }
  return r;
}

}  // namespace

std::string_view to_string(Label l) { return l == Label::Consensus ? "consensus" : "dissensus"; }

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Saddle: return "saddle";
  }
  return "?";
}

void SweepSettings::validate() const {
  if (!(hi > lo)) throw ConfigError("sweep range must have hi > lo");
  if (resolution < 25) throw ConfigError("sweep resolution must be at least 25");
  if (!(dt > 0.0) || !(t_final >= dt)) throw ConfigError("sweep needs 0 < dt <= t_final");
  if (!(settle_tol > 0.0)) throw ConfigError("sweep settle tolerance must be positive");
}

int SweepResult::indeterminate_count() const {
  return static_cast<int>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return c.indeterminate; }));
}

double NullclineField::delta1(double z_r, double z_h) const {
  return opinion::opinion_rate(z_r, z_h, params, adj.robot_hears_human, b_r);
}

double NullclineField::delta2(double z_r, double z_h) const {
  return opinion::opinion_rate(z_h, z_r, params, adj.human_hears_robot, b_h);
}

std::optional<Vec2> newton_polish(const NullclineField& f, Vec2 z0, int max_iter, double tol) {
  Vec2 z = z0;
  Vec2 F = residual(f, z);
  double norm = max_abs(F);
  for (int it = 0; it < max_iter && norm > tol; ++it) {
    const auto J = opinion::jacobian(z.x, z.y, f.params, f.adj).entries;
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const Vec2 step{-(J[1][1] * F.x - J[0][1] * F.y) / det, -(-J[1][0] * F.x + J[0][0] * F.y) / det};
    double lambda = 1.0;
    Vec2 trial = z + step;
    Vec2 Ft = residual(f, trial);
    while (max_abs(Ft) > (1.0 - 1e-4 * lambda) * norm && lambda > 1e-8) {
      lambda *= 0.5;
      trial = z + lambda * step;
      Ft = residual(f, trial);
    }
    if (lambda <= 1e-8) break;
    z = trial;
    F = Ft;
    norm = max_abs(F);
    if (!std::isfinite(norm) || max_abs(z) > 1e6) return std::nullopt;
  }
  if (!(norm < 1e-9)) return std::nullopt;
  return z;
}

Vec2 unbiased_dissensus_equilibrium(const opinion::AgentParams& p, const opinion::Adjacency& adj) {
  const NullclineField f{p, adj, 0.0, 0.0};
  const double guess = p.attention / p.decay;
  auto root = newton_polish(f, {guess, -guess});
  if (!root || !(root->x > 0.0 && root->y < 0.0)) {
    throw NumericalError("no opposite-signed unbiased equilibrium found");
  }
  if (!opinion::jacobian(root->x, root->y, p, adj).stable) {
    throw NumericalError("unbiased dissensus equilibrium is not stable");
  }
  return *root;
}

SweepCell classify_cell(double b_r, double b_h, const opinion::AgentParams& p,
                        const opinion::Adjacency& adj, const SweepSettings& s, Vec2 z0) {
  opinion::OpinionState st{z0.x, z0.y, b_r, b_h, 0.0};
  const long steps = std::lround(s.t_final / s.dt);
  for (long k = 0; k < steps; ++k) st = opinion::step(st, p, p, adj, s.dt);
  SweepCell c;
  c.b_r = b_r;
  c.b_h = b_h;
  c.z_r = st.z_robot;
  c.z_h = st.z_human;
  const int sr = sgn(st.z_robot), sh = sgn(st.z_human);
  c.label = (sr == sh && sr != 0) ? Label::Consensus : Label::Dissensus;
  const double rr = opinion::opinion_rate(st.z_robot, st.z_human, p, adj.robot_hears_human, b_r);
  const double rh = opinion::opinion_rate(st.z_human, st.z_robot, p, adj.human_hears_robot, b_h);
  c.indeterminate = std::max(std::abs(rr), std::abs(rh)) > s.settle_tol;
  return c;
}

SweepResult sweep(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                  const SweepSettings& s) {
  return sweep_impl(p, adj, s, true);
}

SweepResult sweep_serial(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                         const SweepSettings& s) {
  return sweep_impl(p, adj, s, false);
}

SquareReport verify_consensus_square(const SweepResult& r, double u) {
  SquareReport rep;
  const double band = r.step() * (1.0 + 1e-9);
  for (const SweepCell& c : r.cells) {
    if (std::abs(std::abs(c.b_r) - u) <= band || std::abs(std::abs(c.b_h) - u) <= band) {
      ++rep.excluded;
      continue;
    }
    ++rep.checked;
    if (c.indeterminate) ++rep.indeterminate;
    const bool expect = std::abs(c.b_r) > u && std::abs(c.b_h) > u && sgn(c.b_r) == sgn(c.b_h);
    if (expect != (c.label == Label::Consensus)) ++rep.mismatches;
  }
  rep.mismatch_fraction = rep.checked > 0 ? static_cast<double>(rep.mismatches) / rep.checked : 0.0;
  return rep;
}

std::vector<Polyline> nullcline_zero_contours(const NullclineField& f, const ContourSettings& s) {
  if (s.resolution < 2 || !(s.hi > s.lo)) throw ArgumentError("contour grid is degenerate");
  std::vector<Polyline> out;
  for (int field = 1; field <= 2; ++field) {
    auto lines = chain(march(sample(f, field, s)), field);
    out.insert(out.end(), std::make_move_iterator(lines.begin()),
               std::make_move_iterator(lines.end()));
  }
  return out;
}

std::vector<Vec2> contour_intersections(const NullclineField& f,
                                        const std::vector<Polyline>& lines) {
  // Bucket field-2 segments by their bounding box on a coarse grid.
  struct Seg {
    Vec2 a, b;
  };
  std::vector<Seg> s1, s2;
  for (const Polyline& pl : lines) {
    auto& dst = pl.field == 1 ? s1 : s2;
    for (std::size_t k = 1; k < pl.points.size(); ++k) dst.push_back({pl.points[k - 1], pl.points[k]});
  }
  constexpr double kBucket = 0.05;
  auto key = [](double x, double y) {
    return std::pair<long, long>{std::lround(std::floor(x / kBucket)), std::lround(std::floor(y / kBucket))};
  };
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  for (std::size_t k = 0; k < s2.size(); ++k) {
    const auto lo = key(std::min(s2[k].a.x, s2[k].b.x), std::min(s2[k].a.y, s2[k].b.y));
    const auto hi = key(std::max(s2[k].a.x, s2[k].b.x), std::max(s2[k].a.y, s2[k].b.y));
    for (long i = lo.first; i <= hi.first; ++i) {
      for (long j = lo.second; j <= hi.second; ++j) buckets[{i, j}].push_back(k);
    }
  }
  std::vector<Vec2> raw;
  for (const Seg& a : s1) {
    const auto lo = key(std::min(a.a.x, a.b.x), std::min(a.a.y, a.b.y));
    const auto hi = key(std::max(a.a.x, a.b.x), std::max(a.a.y, a.b.y));
    for (long i = lo.first; i <= hi.first; ++i) {
      for (long j = lo.second; j <= hi.second; ++j) {
        auto it = buckets.find({i, j});
        if (it == buckets.end()) continue;
        for (std::size_t k : it->second) {
          if (auto x = segment_cross(a.a, a.b, s2[k].a, s2[k].b)) raw.push_back(*x);
        }
      }
    }
  }
  std::vector<Vec2> out;
  for (const Vec2& z : raw) {
    if (auto root = newton_polish(f, z)) dedup_push(out, *root, 1e-4);
  }
  std::sort(out.begin(), out.end(), [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return out;
}

EquilibriumReport find_equilibria(const opinion::AgentParams& p, const opinion::Adjacency& adj,
                                  double b_r, double b_h, const NewtonSettings& s) {
  if (!std::isfinite(b_r) || !std::isfinite(b_h)) throw DomainError("find_equilibria: non-finite bias");
  if (s.seeds_per_axis < 1) throw ArgumentError("find_equilibria: need at least one seed");
  const NullclineField f{p, adj, b_r, b_h};
  std::vector<Vec2> roots;
  const int n = s.seeds_per_axis;
  const double h = n > 1 ? (s.hi - s.lo) / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (auto z = newton_polish(f, {s.lo + i * h, s.lo + j * h}, s.max_iter, s.tol)) {
        dedup_push(roots, *z, s.dedup);
      }
    }
  }
  if (roots.empty()) throw NumericalError("find_equilibria: no equilibrium found");
  std::sort(roots.begin(), roots.end(), [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  EquilibriumReport rep{b_r, b_h, {}};
  for (const Vec2& z : roots) {
    Equilibrium e;
    e.z_r = z.x;
    e.z_h = z.y;
    e.residual = max_abs(residual(f, z));
    e.jacobian = opinion::jacobian(z.x, z.y, p, adj);
    e.stability = classify(e.jacobian);
    rep.points.push_back(e);
  }
  return rep;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "b_r,b_h,label,z_r,z_h,indeterminate\n";
  out.precision(10);
  for (const SweepCell& c : r.cells) {
    out << c.b_r << ',' << c.b_h << ',' << to_string(c.label) << ',' << c.z_r << ',' << c.z_h << ','
        << (c.indeterminate ? 1 : 0) << '\n';
  }
}

void write_contours_csv(std::ostream& out, const std::vector<Polyline>& lines) {
  out << "field,segment,z_r,z_h\n";
  out.precision(10);
  std::array<int, 3> seg{0, 0, 0};
  for (const Polyline& pl : lines) {
    const int id = seg[static_cast<std::size_t>(pl.field)]++;
    for (const Vec2& p : pl.points) {
      out << "delta" << pl.field << ',' << id << ',' << p.x << ',' << p.y << '\n';
    }
  }
}

void write_equilibria_csv(std::ostream& out, const EquilibriumReport& r) {
  out << "z_r,z_h,stability,residual\n";
  out.precision(12);
  for (const Equilibrium& e : r.points) {
    out << e.z_r << ',' << e.z_h << ',' << to_string(e.stability) << ',' << e.residual << '\n';
  }
}

}  // namespace consensus_lab::analysis
