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

#include "support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace testkit {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("consensus_lab_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace ref {

std::pair<double, int> stuart_maxwell(const std::vector<std::vector<double>>& t) {
  const std::size_t k = t.size();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < k; ++i) {
    long double off = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) off += t[i][j] + t[j][i];
    }
    if (off > 0) active.push_back(i);
  }
  if (active.size() < 2) return {0.0, 0};
  // keep all active but the first
  std::vector<std::size_t> keep(active.begin() + 1, active.end());
  const std::size_t m = keep.size();
  std::vector<long double> d(m);
  std::vector<std::vector<long double>> S(m, std::vector<long double>(2 * m, 0.0L));
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t i = keep[a];
    long double row = 0, col = 0;
    for (std::size_t j : active) {
      row += t[i][j];
      col += t[j][i];
    }
    d[a] = row - col;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t j = keep[b];
      S[a][b] = (a == b) ? row + col - 2.0L * t[i][i] : -(t[i][j] + t[j][i]);
    }
    S[a][m + a] = 1.0L;
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::fabs(S[r][c]) > std::fabs(S[piv][c])) piv = r;
    }
    std::swap(S[c], S[piv]);
    const long double p = S[c][c];
    if (std::fabs(p) < 1e-300L) throw std::runtime_error("singular");
    for (auto& v : S[c]) v /= p;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const long double f = S[r][c];
      for (std::size_t q = 0; q < 2 * m; ++q) S[r][q] -= f * S[c][q];
    }
  }
  long double stat = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) stat += d[a] * S[a][m + b] * d[b];
  }
  return {static_cast<double>(stat), static_cast<int>(m)};
}

double gamma_q(double s, double x) {
  if (x <= 0) return 1.0;
  const long double lg = std::lgamma(static_cast<long double>(s));
  if (x < s + 1) {
    long double term = 1.0L / s, sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (s + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-19L) break;
    }
    return static_cast<double>(1.0L - sum * std::exp(-x + s * std::log((long double)x) - lg));
  }
  const long double tiny = 1e-300L;
  long double b = x + 1 - s, c = 1 / tiny, dd = 1 / b, h = dd;
  for (int i = 1; i < 10000; ++i) {
    const long double an = -i * (i - s);
    b += 2;
    dd = an * dd + b;
    if (std::fabs(dd) < tiny) dd = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    dd = 1 / dd;
    const long double del = dd * c;
    h *= del;
    if (std::fabs(del - 1) < 1e-19L) break;
  }
  return static_cast<double>(std::exp(-x + s * std::log((long double)x) - lg) * h);
}

double chi_square_sf(double x, int df) { return gamma_q(0.5 * df, 0.5 * x); }

namespace {

long double beta_cf(long double a, long double b, long double x) {
  const long double tiny = 1e-300L;
  long double c = 1, d = 1 - (a + b) * x / (a + 1);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1 / d;
  long double h = d;
  for (int m = 1; m < 10000; ++m) {
    const int m2 = 2 * m;
    long double aa = m * (b - m) * x / ((a + m2 - 1) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1));
    d = 1 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    const long double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < 1e-19L) break;
  }
  return h;
}

long double inc_beta(long double a, long double b, long double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const long double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1 - x);
  if (x < (a + 1) / (a + b + 2)) return std::exp(lbt) * beta_cf(a, b, x) / a;
  return 1 - std::exp(lbt) * beta_cf(b, a, 1 - x) / b;
}

}  // namespace

double t_two_sided(double t, double df) {
  return static_cast<double>(inc_beta(0.5L * df, 0.5L, df / (df + (long double)t * t)));
}

double chi_square_gof(const std::vector<double>& o, const std::vector<double>& e) {
  long double s = 0;
  for (std::size_t i = 0; i < o.size(); ++i) s += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  return static_cast<double>(s);
}

void rk4_pair(double& zr, double& zh, double br, double bh, double d, double u, double alpha,
              double gamma, double dt) {
  auto fr = [&](double r, double h) { return -d * r + u * std::tanh(alpha * r + gamma * h) + br; };
  auto fh = [&](double r, double h) { return -d * h + u * std::tanh(alpha * h + gamma * r) + bh; };
  const double k1r = fr(zr, zh), k1h = fh(zr, zh);
  const double k2r = fr(zr + 0.5 * dt * k1r, zh + 0.5 * dt * k1h);
  const double k2h = fh(zr + 0.5 * dt * k1r, zh + 0.5 * dt * k1h);
  const double k3r = fr(zr + 0.5 * dt * k2r, zh + 0.5 * dt * k2h);
  const double k3h = fh(zr + 0.5 * dt * k2r, zh + 0.5 * dt * k2h);
  const double k4r = fr(zr + dt * k3r, zh + dt * k3h);
  const double k4h = fh(zr + dt * k3r, zh + dt * k3h);
  zr += dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
  zh += dt / 6.0 * (k1h + 2 * k2h + 2 * k3h + k4h);
}

}  // namespace ref
}  // namespace testkit
