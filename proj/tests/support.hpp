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

// Shared test helpers: a seeded generator for property tests and reference
// implementations written independently of the library.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testkit {

inline constexpr int kCases = 200;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  int sign() { return coin() ? 1 : -1; }
  std::uint64_t bits() { return rng_(); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& p);

namespace ref {

// Stuart-Maxwell dropping the first active category; long double
// Gauss-Jordan inverse. Returns {statistic, df}.
std::pair<double, int> stuart_maxwell(const std::vector<std::vector<double>>& t);

// Regularized upper incomplete gamma Q(s, x) by series / Lentz fraction.
double gamma_q(double s, double x);
double chi_square_sf(double x, int df);

// Two-sided Student t tail by the regularized incomplete beta.
double t_two_sided(double t, double df);

double chi_square_gof(const std::vector<double>& o, const std::vector<double>& e);

// Classical RK4 on the coupled pair, written out long-hand.
void rk4_pair(double& zr, double& zh, double br, double bh, double d, double u, double alpha,
              double gamma, double dt);

}  // namespace ref
}  // namespace testkit
