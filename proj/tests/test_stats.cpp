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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/stats.hpp"
#include "support.hpp"

namespace cl = consensus_lab;
using namespace consensus_lab::stats;

TEST(Stats, ChiSquareTailOracle) {
  EXPECT_NEAR(chi_square_sf(1, 1), 0.31731050786291115, 1e-12);
  EXPECT_NEAR(chi_square_sf(3.5, 2), 0.1737739434504451, 1e-12);
  EXPECT_NEAR(chi_square_sf(10, 3), 0.01856613546304325, 1e-12);
  EXPECT_NEAR(chi_square_sf(0.5, 5), 0.9921232932326296, 1e-12);
  EXPECT_NEAR(chi_square_sf(68.125, 3) / 1.075666679550759e-14, 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(chi_square_sf(0, 4), 1.0);
}

TEST(Stats, ChiSquareTailMatchesReferenceProperty) {
  testkit::Gen g(81);
  for (int i = 0; i < testkit::kCases; ++i) {
    const int df = g.integer(1, 12);
    const double x = g.uniform(0.01, 60);
    const double want = testkit::ref::chi_square_sf(x, df);
    EXPECT_NEAR(chi_square_sf(x, df), want, 1e-10 + 1e-9 * want) << x << " " << df;
  }
}

TEST(Stats, StuartMaxwellOracle) {
  const TestResult r = stuart_maxwell(std::vector<std::vector<double>>{
      {20, 3, 5, 1}, {2, 10, 4, 0}, {9, 6, 30, 2}, {0, 1, 3, 4}});
  EXPECT_NEAR(r.statistic, 1.612184249628529, 1e-10);
  EXPECT_EQ(r.df, 3);
  EXPECT_NEAR(r.p, 0.6566302893194749, 1e-10);
}

TEST(Stats, StuartMaxwellSingleRowTable) {
  ContingencyTable t{};
  t[2] = {42, 7, 2, 0};
  const TestResult r = stuart_maxwell(t);
  EXPECT_NEAR(r.statistic, 49.0, 1e-9);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p / 2.2897348456455575e-11, 1.0, 1e-8);
}

TEST(Stats, StuartMaxwellTwoByTwoIsMcNemar) {
  const TestResult r = stuart_maxwell(std::vector<std::vector<double>>{{10, 6}, {2, 10}});
  EXPECT_NEAR(r.statistic, 2.0, 1e-12);
  EXPECT_EQ(r.df, 1);
}

TEST(Stats, StuartMaxwellMatchesReferenceProperty) {
  testkit::Gen g(82);
  int checked = 0;
  for (int i = 0; i < testkit::kCases; ++i) {
    const int k = g.integer(2, 5);
    std::vector<std::vector<double>> t(k, std::vector<double>(k));
    for (auto& row : t)
      for (double& v : row) v = g.integer(0, 9) < 3 ? 0 : g.integer(0, 30);
    TestResult r;
    try {
      r = stuart_maxwell(t);
    } catch (const cl::UndefinedTestError&) {
      continue;
    }
    const auto [stat, df] = testkit::ref::stuart_maxwell(t);
    EXPECT_NEAR(r.statistic, stat, 1e-9 * std::max(1.0, stat));
    EXPECT_EQ(r.df, df);
    ++checked;
  }
  EXPECT_GT(checked, testkit::kCases / 2);
}

TEST(Stats, StuartMaxwellInvariantUnderRelabelling) {
  testkit::Gen g(83);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<double>> t(4, std::vector<double>(4));
    for (auto& row : t)
      for (double& v : row) v = g.integer(1, 20);
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), g.engine());
    std::vector<std::vector<double>> p(4, std::vector<double>(4));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) p[a][b] = t[perm[a]][perm[b]];
    EXPECT_NEAR(stuart_maxwell(t).statistic, stuart_maxwell(p).statistic, 1e-9);
  }
}

TEST(Stats, SymmetricTableHasZeroStatistic) {
  testkit::Gen g(84);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<double>> t(4, std::vector<double>(4));
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) t[a][b] = t[b][a] = g.integer(1, 20);
    const TestResult r = stuart_maxwell(t);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p, 1.0, 1e-12);
  }
}

TEST(Stats, StuartMaxwellUndefined) {
  ContingencyTable diag{};
  for (int i = 0; i < kCategories; ++i) diag[i][i] = 5;
  EXPECT_EQ(stuart_maxwell(diag).statistic, 0.0);
  // two disconnected discordant pairs: singular covariance
  ContingencyTable split{};
  split[0][1] = 3;
  split[3][2] = 4;
  EXPECT_THROW(stuart_maxwell(split), cl::UndefinedTestError);
}

TEST(Stats, GoodnessOfFit) {
  const TestResult r = chi_square_gof({34, 9, 8}, {17, 17, 17});
  EXPECT_NEAR(r.statistic, 25.529411764705884, 1e-10);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p / 2.859951525640375e-06, 1.0, 1e-8);
  testkit::Gen g(85);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> o(4), e(4);
    for (int k = 0; k < 4; ++k) {
      o[k] = g.integer(0, 40);
      e[k] = g.uniform(1, 40);
    }
    EXPECT_NEAR(chi_square_gof(o, e).statistic, testkit::ref::chi_square_gof(o, e), 1e-9);
  }
  EXPECT_THROW(chi_square_gof({1, 2}, {1, 0}), cl::ArgumentError);
}

TEST(Stats, OneSampleT) {
  const TestResult r = one_sample_t({5, 6, 7, 8, 9, 10, 6.5}, 5.5);
  EXPECT_NEAR(r.statistic, 2.8091013836559164, 1e-12);
  EXPECT_EQ(r.df, 6);
  EXPECT_NEAR(r.p, 0.03079259186621472, 1e-10);
  testkit::Gen g(86);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(g.integer(3, 60));
    for (double& x : v) x = g.uniform(-8, 16);
    const TestResult t = one_sample_t(v, 0.0);
    EXPECT_NEAR(t.p, testkit::ref::t_two_sided(t.statistic, t.df), 1e-10);
  }
  EXPECT_THROW(one_sample_t({1.0}, 0), cl::UndefinedTestError);
  EXPECT_THROW(one_sample_t({2.0, 2.0, 2.0}, 0), cl::UndefinedTestError);
}

TEST(Stats, LargeTStatisticHasTinyP) {
  // mean 2.6, sample sd 1.5, n = 51
  std::vector<double> v{2.6};
  for (int i = 0; i < 50; ++i) v.push_back(i % 2 == 0 ? 4.1 : 1.1);
  const TestResult t = one_sample_t(v, 0.0);
  EXPECT_NEAR(t.statistic, 2.6 / (1.5 / std::sqrt(51.0)), 1e-9);
  EXPECT_EQ(t.df, 50);
  EXPECT_LT(t.p, 1e-15);
  EXPECT_NEAR(t.p / testkit::ref::t_two_sided(t.statistic, t.df), 1.0, 1e-6);
}

TEST(Stats, ModalOutcomeTieBreak) {
  using cl::protocol::Outcome;
  EXPECT_EQ(modal_outcome({Outcome::C, Outcome::C, Outcome::D}), Outcome::C);
  EXPECT_EQ(modal_outcome({Outcome::C, Outcome::D}), Outcome::D);
  EXPECT_EQ(modal_outcome({Outcome::C, Outcome::CH}), Outcome::CH);
  EXPECT_EQ(modal_outcome({Outcome::CH, Outcome::DH}), Outcome::DH);
  EXPECT_EQ(modal_outcome({Outcome::DH, Outcome::D, Outcome::C}), Outcome::D);
  EXPECT_THROW(modal_outcome({}), cl::ArgumentError);
}

TEST(Stats, TablesFromParticipants) {
  using cl::protocol::Outcome;
  std::vector<ParticipantOutcomes> ps;
  ps.push_back({0, {Outcome::D, Outcome::D, Outcome::C, Outcome::C, Outcome::C, Outcome::C, Outcome::CH, Outcome::C}});
  ps.push_back({1, {Outcome::D, Outcome::DH, Outcome::DH, Outcome::D, Outcome::D, Outcome::D, Outcome::C, Outcome::C}});
  const OutcomeTable t = outcome_frequencies(ps);
  EXPECT_EQ(t.n_participants, 2);
  EXPECT_EQ(t.counts[0][static_cast<int>(Outcome::D)], 2);
  EXPECT_DOUBLE_EQ(t.percent(6, Outcome::CH), 50.0);
  const auto ctrl = majority_category(ps, Phase::Control);
  const auto exp = majority_category(ps, Phase::Experiment);
  EXPECT_EQ(ctrl[0], Outcome::D);
  EXPECT_EQ(ctrl[1], Outcome::DH);
  EXPECT_EQ(exp[0], Outcome::C);
  EXPECT_EQ(exp[1], Outcome::D);
  const ContingencyTable c = contingency(ctrl, exp);
  EXPECT_EQ(c[static_cast<int>(Outcome::D)][static_cast<int>(Outcome::C)], 1);
  ps[1].trials.pop_back();
  EXPECT_THROW(outcome_frequencies(ps), cl::ArgumentError);
}
