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

#pragma once

#include <array>
#include <cstddef>

namespace consensus_lab {

template <std::size_t N>
using StateVec = std::array<double, N>;

// One classical fourth-order Runge-Kutta step of y' = f(y) (autonomous; any
// time dependence is held constant by the caller for the duration of the
// step). Deterministic: fixed evaluation order, no fused tricks.
template <std::size_t N, typename Deriv>
StateVec<N> rk4_step(const StateVec<N>& y, double dt, Deriv&& f) {
  auto axpy = [](const StateVec<N>& base, double h, const StateVec<N>& k) {
    StateVec<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + h * k[i];
    return out;
  };
  const StateVec<N> k1 = f(y);
  const StateVec<N> k2 = f(axpy(y, 0.5 * dt, k1));
  const StateVec<N> k3 = f(axpy(y, 0.5 * dt, k2));
  const StateVec<N> k4 = f(axpy(y, dt, k3));
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace consensus_lab
