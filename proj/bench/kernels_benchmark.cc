// Copyright 2026 The OTCIL Authors. All Rights Reserved.
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

// Serial reference vs OpenMP paths for layer stepping and test evaluation.

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "otcil/ensemble.h"
#include "otcil/stream.h"

namespace otcil {
namespace {

NetworkConfig BenchNetwork(int layers) {
  NetworkConfig n;
  n.layers = layers;
  n.nodes = 64;
  n.input_dim = 32;
  n.classes = 10;
  n.seed = 3;
  return n;
}

std::vector<StreamBatch> BenchBatches(int count, int rows) {
  SyntheticSpec spec;
  spec.dims = 32;
  spec.samples_per_class = count * rows / 10 + 1;
  spec.test_per_class = 1;
  spec.seed = 11;
  const auto data = MakeGaussianClusters(spec).first;
  TaskSplitSpec split;
  split.tasks = 1;
  const auto stream = Batchify(SplitClassIncremental(data, split), rows, 10);
  return {stream.batches.begin(), stream.batches.begin() + count};
}

void BM_StepLayers(benchmark::State& state) {
  const Execution exec =
      state.range(0) ? Execution::kParallel : Execution::kSerial;
  const int layers = static_cast<int>(state.range(1));
  const auto batches = BenchBatches(64, 20);
  RegStyle style;
  style.kind = RegKind::kKfBayes;
  for (auto _ : state) {
    state.PauseTiming();
    OnlineEdRvfl model(BenchNetwork(layers), style, exec);
    model.Prime(batches[0].inputs);
    state.ResumeTiming();
    for (size_t t = 0; t + 1 < batches.size(); ++t) {
      benchmark::DoNotOptimize(
          model.Observe(batches[t + 1].inputs, batches[t].targets));
    }
  }
  state.SetItemsProcessed(state.iterations() * (batches.size() - 1));
}
BENCHMARK(BM_StepLayers)
    ->ArgNames({"parallel", "layers"})
    ->Args({0, 4})
    ->Args({1, 4})
    ->Args({0, 8})
    ->Args({1, 8})
    ->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto batches = BenchBatches(4, 20);
  OnlineEdRvfl model(BenchNetwork(4), RegStyle{}, Execution::kParallel);
  model.Prime(batches[0].inputs);
  for (size_t t = 0; t + 1 < batches.size(); ++t) {
    model.Observe(batches[t + 1].inputs, batches[t].targets);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Matrix test(4096, 32);
  for (Index i = 0; i < test.size(); ++i) test.data()[i] = u(rng);
  for (auto _ : state) {
    if (parallel) {
      benchmark::DoNotOptimize(model.Evaluate(test));
    } else {
      benchmark::DoNotOptimize(model.EvaluateReference(test));
    }
  }
  state.SetItemsProcessed(state.iterations() * test.rows());
}
BENCHMARK(BM_Evaluate)
    ->ArgName("parallel")
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace otcil

BENCHMARK_MAIN();
