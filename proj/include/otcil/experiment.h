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

#ifndef OTCIL_EXPERIMENT_H_
#define OTCIL_EXPERIMENT_H_

// The online loop: build the stream, feed it to the ensemble one batch at a
// time, and record metrics at the configured cadence.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "otcil/baselines.h"
#include "otcil/config.h"
#include "otcil/errors.h"
#include "otcil/metrics.h"
#include "otcil/stream.h"

namespace otcil {

struct PreparedRun {
  NetworkConfig network;  // input_dim and classes filled in
  LabeledDataset test;
  std::vector<std::vector<int>> task_classes;
  BatchStream stream;
};

// Loads or generates the data and cuts the stream. Throws ConfigError,
// FormatError or ContractError.
PreparedRun PrepareRun(const RunConfig& config);

std::vector<BaselineRecord> RunBaselines(const RunConfig& config,
                                         const PreparedRun& run);

struct RunReport {
  nlohmann::json config;
  SeedSet seeds;
  bool completed = false;
  std::string failure;
  int64_t failed_batch = -1;
  int failed_layer = -1;

  int64_t batches = 0;
  int tasks = 0;
  int batch_size = 0;
  uint64_t stream_hash = 0;
  // Boundary lookups made while a learner step was running. Must be zero.
  int64_t learner_annotation_reads = 0;
  size_t state_bytes_initial = 0;
  size_t state_bytes_final = 0;

  TraceSeries trace;
  AccuracyMatrix accuracy;
  double acc = 0.0;  // NaN when undefined
  double bwt = 0.0;
  double fwt = 0.0;
  std::vector<double> batch_seconds;  // learner step time per batch
  std::vector<BaselineRecord> baselines;

  double final_acc_full() const;
  double cumulative_regret() const;
};

// Carries the report accumulated up to the failing batch.
class ExperimentFailure : public NumericalError {
 public:
  ExperimentFailure(const NumericalError& cause, RunReport partial)
      : NumericalError(cause.what(), cause.batch_index(), cause.layer_index()),
        partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

RunReport RunPrepared(const RunConfig& config, const PreparedRun& run,
                      const std::vector<BaselineRecord>& baselines);

RunReport RunExperiment(const RunConfig& config);

struct Spread {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Spread Summarize(std::vector<double> values);

struct StyleSummary {
  std::string label;
  RegStyle style;
  std::vector<double> acc;
  std::vector<double> bwt;
  std::vector<double> fwt;
  std::vector<double> cum_regret;
  std::vector<double> final_acc_full;
  std::vector<double> offline_acc;
};

struct Comparison {
  int repeats = 0;
  std::vector<StyleSummary> styles;
};

// Seeds for repeat r are the configured seeds plus r. Every style sees the
// same stream within a repeat. Throws ContractError when the configs differ
// in anything besides style and output_dir.
Comparison CompareStyles(const std::vector<RunConfig>& configs, int repeats);

RunConfig WithSeedOffset(const RunConfig& config, uint64_t offset);

}  // namespace otcil

#endif  // OTCIL_EXPERIMENT_H_
