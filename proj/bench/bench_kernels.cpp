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

#include <benchmark/benchmark.h>

#include "consensus_lab/analysis.hpp"
#include "consensus_lab/protocol.hpp"

namespace cl = consensus_lab;

namespace {

cl::analysis::SweepSettings sweep_settings(int resolution) {
  cl::analysis::SweepSettings s;
  s.resolution = resolution;
  return s;
}

void BM_Sweep(benchmark::State& state) {
  const auto s = sweep_settings(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cl::analysis::sweep({}, {}, s));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto s = sweep_settings(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cl::analysis::sweep_serial({}, {}, s));
}

cl::protocol::AgentFactory model() {
  return [](int, std::uint64_t seed) {
    return std::make_unique<cl::human::ModelHumanAgent>(cl::human::CohortParams{}, seed);
  };
}

void BM_Session(benchmark::State& state) {
  const auto f = model();
  for (auto _ : state) benchmark::DoNotOptimize(cl::protocol::run_session(f, static_cast<int>(state.range(0)), 1, {}));
}

void BM_SessionSerial(benchmark::State& state) {
  const auto f = model();
  for (auto _ : state)
    benchmark::DoNotOptimize(cl::protocol::run_session_serial(f, static_cast<int>(state.range(0)), 1, {}));
}

}  // namespace

BENCHMARK(BM_Sweep)->Arg(25)->Arg(61)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(25)->Arg(61)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Session)->Arg(16)->Arg(51)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SessionSerial)->Arg(16)->Arg(51)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
