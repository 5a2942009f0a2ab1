// Copyright 2026 The emostim Authors
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

#include <random>
#include <string>
#include <vector>

#include "emostim/aggregation.hpp"
#include "emostim/model_spec.hpp"
#include "emostim/prompt_transforms.hpp"
#include "emostim/scoring.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {
namespace {

void BM_Compose(benchmark::State& state) {
  const Transform t = ParseTransform("EP01+EP04+EP07");
  for (auto _ : state) {
    benchmark::DoNotOptimize(Compose("Determine whether a movie review is positive or negative.", t));
  }
}
BENCHMARK(BM_Compose);

void BM_NormalizeAnswer(benchmark::State& state) {
  const std::string text(static_cast<std::size_t>(state.range(0)), 'A');
  for (auto _ : state) benchmark::DoNotOptimize(NormalizeAnswer("  The Answer: " + text + "!  "));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalizeAnswer)->Arg(16)->Arg(256)->Arg(4096);

void BM_ScoreSampleMultichoice(benchmark::State& state) {
  TaskSpec task;
  task.id = "choice";
  task.kind = TaskKind::kMultipleChoice;
  task.match_mode = MatchMode::kMultichoice;
  task.samples.push_back({"0", "Which is larger?", {"whale"}, std::vector<std::string>{"cat", "whale", "ant", "dog"}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScoreSample(task, task.samples[0], "I think the answer is (B) whale."));
  }
}
BENCHMARK(BM_ScoreSampleMultichoice);

void BM_RequestHash(benchmark::State& state) {
  const ModelSpec spec = ParseModelSpec("gpt-x@http://localhost/v1");
  const std::string prompt(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(RequestHash(spec, prompt));
}
BENCHMARK(BM_RequestHash)->Arg(128)->Arg(8192);

void BM_AggregateOursMatrix(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> stimuli;
  std::vector<std::vector<double>> m(11, std::vector<double>(static_cast<std::size_t>(state.range(0))));
  for (int i = 0; i < 11; ++i) stimuli.push_back("EP" + std::to_string(i));
  for (auto& row : m) {
    for (double& v : row) v = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(AggregateOursMatrix(stimuli, m));
}
BENCHMARK(BM_AggregateOursMatrix)->Arg(8)->Arg(512);

}  // namespace
}  // namespace emostim

BENCHMARK_MAIN();
