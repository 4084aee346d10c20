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

#include "consensus_lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "consensus_lab/errors.hpp"

namespace consensus_lab::stats {
namespace {

// Lower rank = more severe.
int severity(Outcome o) {
  switch (o) {
    case Outcome::D: return 0;
    case Outcome::DH: return 1;
    case Outcome::CH: return 2;
    case Outcome::C: return 3;
  }
  return 4;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : A) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    if (std::abs(A[piv][c]) <= 1e-12 * std::max(scale, 1.0)) {
      throw UndefinedTestError("Stuart-Maxwell covariance is singular");
    }
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace

std::vector<ParticipantOutcomes> outcomes_of(const std::vector<protocol::SessionRecord>& sessions) {
  std::vector<ParticipantOutcomes> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    ParticipantOutcomes p{s.participant_id, {}};
    for (const auto& t : s.trials) p.trials.push_back(t.outcome);
    out.push_back(std::move(p));
  }
  return out;
}

double OutcomeTable::percent(int trial_index0, Outcome o) const {
  if (n_participants == 0) return 0.0;
  return 100.0 * counts.at(static_cast<std::size_t>(trial_index0))[static_cast<std::size_t>(o)] /
         n_participants;
}

OutcomeTable outcome_frequencies(const std::vector<ParticipantOutcomes>& participants) {
  if (participants.empty()) throw ArgumentError("outcome_frequencies: no participants");
  const std::size_t trials = participants.front().trials.size();
  if (trials == 0) throw ArgumentError("outcome_frequencies: no trials");
  OutcomeTable t;
  t.n_participants = static_cast<int>(participants.size());
  t.counts.assign(trials, {0, 0, 0, 0});
  for (const auto& p : participants) {
    if (p.trials.size() != trials) {
      throw ArgumentError("outcome_frequencies: participant " + std::to_string(p.participant_id) +
                          " has a different number of trials");
    }
    for (std::size_t i = 0; i < trials; ++i) ++t.counts[i][static_cast<std::size_t>(p.trials[i])];
  }
  return t;
}

Outcome modal_outcome(const std::vector<Outcome>& outcomes) {
  if (outcomes.empty()) throw ArgumentError("modal_outcome: empty");
  std::array<int, kCategories> n{};
  for (Outcome o : outcomes) ++n[static_cast<std::size_t>(o)];
  Outcome best = Outcome::C;
  int best_n = -1;
  for (Outcome o : {Outcome::C, Outcome::CH, Outcome::D, Outcome::DH}) {
    const int c = n[static_cast<std::size_t>(o)];
    if (c > best_n || (c == best_n && severity(o) < severity(best))) {
      best = o;
      best_n = c;
    }
  }
  return best;
}

std::vector<Outcome> majority_category(const std::vector<ParticipantOutcomes>& participants, Phase phase) {
  if (participants.empty()) throw ArgumentError("majority_category: no participants");
  const std::size_t lo = phase == Phase::Control ? 0 : 3;
  const std::size_t hi = phase == Phase::Control ? 3 : 8;
  std::vector<Outcome> out;
  out.reserve(participants.size());
  for (const auto& p : participants) {
    if (p.trials.size() < hi) {
      throw ArgumentError("majority_category: participant " + std::to_string(p.participant_id) +
                          " lacks trials for this phase");
    }
    out.push_back(modal_outcome({p.trials.begin() + static_cast<long>(lo),
                                 p.trials.begin() + static_cast<long>(hi)}));
  }
  return out;
}

ContingencyTable contingency(const std::vector<Outcome>& control, const std::vector<Outcome>& experiment) {
  if (control.size() != experiment.size()) throw ArgumentError("contingency: length mismatch");
  ContingencyTable t{};
  for (std::size_t i = 0; i < control.size(); ++i) {
    ++t[static_cast<std::size_t>(control[i])][static_cast<std::size_t>(experiment[i])];
  }
  return t;
}

double chi_square_sf(double x, int df) {
  if (df <= 0) throw ArgumentError("chi_square_sf: df must be positive");
  if (!(x > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

TestResult stuart_maxwell(const std::vector<std::vector<double>>& table) {
  const std::size_t k = table.size();
  for (const auto& row : table) {
    if (row.size() != k) throw ArgumentError("stuart_maxwell: table must be square");
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("stuart_maxwell: counts must be >= 0");
    }
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < k; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) off += table[i][j] + table[j][i];
    }
    if (off > 0.0) active.push_back(i);
  }
  if (active.empty()) return {0.0, 0, 1.0};
  if (active.size() < 2) throw UndefinedTestError("Stuart-Maxwell needs two active categories");
  const std::size_t m = active.size() - 1;
  std::vector<double> d(m);
  std::vector<std::vector<double>> S(m, std::vector<double>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t i = active[a];
    double r = 0.0, c = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      r += table[i][j];
      c += table[j][i];
    }
    d[a] = r - c;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t j = active[b];
      S[a][b] = a == b ? r + c - 2.0 * table[i][i] : -(table[i][j] + table[j][i]);
    }
  }
  bool zero = true;
  for (double v : d) zero = zero && v == 0.0;
  const int df = static_cast<int>(m);
  if (zero) return {0.0, df, 1.0};
  const std::vector<double> x = solve(S, d);
  double stat = 0.0;
  for (std::size_t a = 0; a < m; ++a) stat += d[a] * x[a];
  stat = std::max(stat, 0.0);
  return {stat, df, chi_square_sf(stat, df)};
}

TestResult stuart_maxwell(const ContingencyTable& table) {
  std::vector<std::vector<double>> t(kCategories, std::vector<double>(kCategories));
  for (std::size_t i = 0; i < kCategories; ++i) {
    for (std::size_t j = 0; j < kCategories; ++j) t[i][j] = table[i][j];
  }
  return stuart_maxwell(t);
}

TestResult chi_square_gof(const std::vector<double>& counts, const std::vector<double>& expected) {
  if (counts.size() != expected.size()) throw ArgumentError("chi_square_gof: length mismatch");
  if (counts.size() < 2) throw ArgumentError("chi_square_gof: need at least two categories");
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(expected[i] > 0.0)) throw ArgumentError("chi_square_gof: expected counts must be positive");
    const double diff = counts[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const int df = static_cast<int>(counts.size()) - 1;
  return {stat, df, chi_square_sf(stat, df)};
}

TestResult one_sample_t(const std::vector<double>& values, double mu0) {
  const std::size_t n = values.size();
  if (n < 2) throw UndefinedTestError("one_sample_t: need at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw UndefinedTestError("one_sample_t: zero sample variance");
  const double t = (mean - mu0) / std::sqrt(var / static_cast<double>(n));
  const int df = static_cast<int>(n) - 1;
  const boost::math::students_t dist(df);
  const double p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return {t, df, p};
}

}  // namespace consensus_lab::stats
