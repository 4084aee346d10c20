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

// Outcome tables and the tests used on them: Stuart-Maxwell marginal
// homogeneity, chi-square goodness of fit, one-sample t.

#pragma once

#include <array>
#include <vector>

#include "consensus_lab/protocol.hpp"

namespace consensus_lab::stats {

using protocol::Outcome;

inline constexpr int kCategories = 4;  // C, CH, D, DH

struct ParticipantOutcomes {
  int participant_id = 0;
  std::vector<Outcome> trials;  // trial 1 first
};

std::vector<ParticipantOutcomes> outcomes_of(const std::vector<protocol::SessionRecord>& sessions);

struct OutcomeTable {
  int n_participants = 0;
  std::vector<std::array<int, kCategories>> counts;  // per trial

  double percent(int trial_index0, Outcome o) const;
};

// Throws ArgumentError when empty or when participants differ in trial count.
OutcomeTable outcome_frequencies(const std::vector<ParticipantOutcomes>& participants);

enum class Phase { Control, Experiment };  // trials 1-3, trials 4-8

// Modal outcome; ties go to the more severe category (D > DH > CH > C).
Outcome modal_outcome(const std::vector<Outcome>& outcomes);
std::vector<Outcome> majority_category(const std::vector<ParticipantOutcomes>& participants, Phase phase);

using ContingencyTable = std::array<std::array<int, kCategories>, kCategories>;

// Rows control category, columns experiment category.
ContingencyTable contingency(const std::vector<Outcome>& control, const std::vector<Outcome>& experiment);

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
};

// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int df);

// Generic k x k table. Categories with no off-diagonal mass are dropped.
// Throws UndefinedTestError when the reduced covariance is singular.
TestResult stuart_maxwell(const std::vector<std::vector<double>>& table);
TestResult stuart_maxwell(const ContingencyTable& table);

TestResult chi_square_gof(const std::vector<double>& counts, const std::vector<double>& expected);

// Two-sided. Throws UndefinedTestError for n < 2 or zero variance.
TestResult one_sample_t(const std::vector<double>& values, double mu0);

}  // namespace consensus_lab::stats
