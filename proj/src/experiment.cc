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

#include "otcil/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "otcil/ensemble.h"

namespace otcil {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<LabeledDataset, LabeledDataset> LoadData(const RunConfig& config) {
  const DatasetConfig& d = config.dataset;
  switch (d.source) {
    case DataSource::kSynthetic:
      return MakeGaussianClusters(d.synthetic);
    case DataSource::kIdx:
      return {LoadIdx(d.idx.train_images, d.idx.train_labels, Split::kTrain),
              LoadIdx(d.idx.test_images, d.idx.test_labels, Split::kTest)};
    case DataSource::kCsv:
      return {LoadCsvFeatures(d.csv.train, d.csv.schema, Split::kTrain),
              LoadCsvFeatures(d.csv.test, d.csv.schema, Split::kTest)};
  }
  throw ConfigError("dataset.source: unsupported");
}

size_t StateBytes(const OnlineEdRvfl& model) {
  size_t bytes = 0;
  for (int l = 0; l < model.num_layers(); ++l) {
    bytes += model.layer(l).FootprintBytes();
  }
  return bytes;
}

void Finalize(RunReport& report, const std::vector<BaselineRecord>& baselines) {
  const int q = report.tasks;
  for (const auto& b : baselines) {
    if (b.kind == BaselineKind::kSeparate) {
      for (int i = 0; i < q; ++i) {
        report.accuracy.independent(i) = b.task_accuracy[i];
      }
    }
  }
  const auto guarded = [](auto fn) {
    try {
      return fn();
    } catch (const ContractError&) {
      return kNaN;
    }
  };
  report.acc = guarded([&] { return ComputeAcc(report.accuracy); });
  report.bwt = guarded([&] { return ComputeBwt(report.accuracy); });
  report.fwt = guarded([&] { return ComputeFwt(report.accuracy); });
}

}  // namespace

double RunReport::final_acc_full() const {
  return trace.empty() ? kNaN : trace.points().back().acc_full;
}

double RunReport::cumulative_regret() const {
  return trace.empty() ? kNaN : trace.points().back().cum_regret;
}

PreparedRun PrepareRun(const RunConfig& config) {
  auto [train, test] = LoadData(config);
  train.Validate();
  test.Validate();
  if (train.dim() != test.dim()) {
    throw FormatError("train and test feature widths differ");
  }
  const int classes = std::max(train.classes, test.classes);
  train.classes = classes;
  test.classes = classes;
  if (classes % config.task_split.tasks != 0) {
    throw ConfigError("task_split.tasks: " +
                      std::to_string(config.task_split.tasks) +
                      " does not divide the class load " +
                      std::to_string(classes));
  }

  PreparedRun run;
  run.network = config.network;
  run.network.input_dim = static_cast<int>(train.dim());
  run.network.classes = classes;
  run.task_classes = ClassGroups(classes, config.task_split);
  const std::vector<Task> tasks =
      SplitClassIncremental(train, config.task_split);

  int batch_size = config.batch_size;
  if (config.task_split.batches_per_class > 0) {
    const Index per = static_cast<Index>(classes) *
                      config.task_split.batches_per_class;
    batch_size = static_cast<int>((train.size() + per - 1) / per);
  }
  run.stream = Batchify(tasks, batch_size, classes);
  run.test = std::move(test);
  return run;
}

std::vector<BaselineRecord> RunBaselines(const RunConfig& config,
                                         const PreparedRun& run) {
  std::vector<BaselineRecord> out;
  for (BaselineKind kind : config.baselines) {
    out.push_back(FitBaseline(kind, run.stream, run.test, run.task_classes,
                              run.network));
  }
  return out;
}

RunReport RunPrepared(const RunConfig& config, const PreparedRun& run,
                      const std::vector<BaselineRecord>& baselines) {
  const BatchStream& stream = run.stream;
  const int64_t total = stream.size();
  const int q_total = static_cast<int>(run.task_classes.size());

  RunReport report;
  report.config = RunConfigToJson(config);
  report.seeds = config.seeds;
  report.batches = total;
  report.tasks = q_total;
  report.batch_size = stream.batch_size;
  report.stream_hash = stream.Hash();
  report.accuracy = AccuracyMatrix::Undefined(q_total);
  report.baselines = baselines;
  report.acc = report.bwt = report.fwt = kNaN;
  if (total == 0) throw ContractError("stream has no batches");

  const Matrix test_targets = OneHot(run.test.labels, run.network.classes);
  std::vector<bool> seen(run.network.classes, false);
  std::vector<bool> in_task(run.network.classes, false);

  OnlineEdRvfl model(run.network, config.style, config.execution);
  report.state_bytes_initial = StateBytes(model);
  const bool adaptive = config.style.kind == RegKind::kKfBayes;
  int64_t t = 0;
  try {
    {
      BoundaryAnnotations::LearnerScope scope(stream.annotations);
      model.Prime(stream.batches[0].inputs);
    }
    for (t = 0; t < total; ++t) {
      const StreamBatch& batch = stream.batches[t];
      const bool last = t + 1 == total;
      std::vector<AdaptiveKPair> ks;
      const auto start = std::chrono::steady_clock::now();
      {
        BoundaryAnnotations::LearnerScope scope(stream.annotations);
        ks = last ? model.ObserveLast(batch.targets)
                  : model.Observe(stream.batches[t + 1].inputs, batch.targets);
      }
      const auto stop = std::chrono::steady_clock::now();
      report.batch_seconds.push_back(
          std::chrono::duration<double>(stop - start).count());

      // The final pair has no look-ahead batch; it is not part of the trace.
      if (adaptive && !last) {
        for (size_t l = 0; l < ks.size(); ++l) {
          report.trace.AppendK(
              {t + 1, static_cast<int>(l), ks[l].current, ks[l].next});
        }
      }
      for (Index j = 0; j < batch.targets.cols(); ++j) {
        if (batch.targets.col(j).any()) seen[j] = true;
      }

      const bool ends_task = stream.annotations.EndsTask(t);
      if (config.cadence == Cadence::kEveryTask && !ends_task) continue;

      const Evaluation ev = model.Evaluate(run.test.features);
      const std::vector<int> predicted = ArgmaxRows(ev.fused);
      const double acc_full = SubsetAccuracy(
          predicted, run.test.labels,
          std::vector<bool>(run.network.classes, true));
      const double acc_seen =
          SubsetAccuracy(predicted, run.test.labels, seen);
      report.trace.Append(t + 1, acc_seen, acc_full,
                          ImmediateRegret(ev.layer_probabilities, test_targets),
                          ImmediateKl(ev.layer_probabilities, test_targets));

      if (ends_task) {
        const int q = stream.annotations.TaskOf(t);
        for (int j = 0; j <= q; ++j) {
          std::fill(in_task.begin(), in_task.end(), false);
          for (int c : run.task_classes[j]) in_task[c] = true;
          report.accuracy.r(q, j) =
              SubsetAccuracy(predicted, run.test.labels, in_task);
        }
      }
    }
  } catch (const NumericalError& e) {
    report.completed = false;
    report.failure = e.what();
    report.failed_batch = e.batch_index() >= 0 ? e.batch_index() : t + 1;
    report.failed_layer = e.layer_index();
    report.learner_annotation_reads = stream.annotations.learner_reads();
    report.state_bytes_final = StateBytes(model);
    Finalize(report, baselines);
    throw ExperimentFailure(
        NumericalError(e.what(), report.failed_batch, report.failed_layer),
        std::move(report));
  }
  report.completed = true;
  report.learner_annotation_reads = stream.annotations.learner_reads();
  report.state_bytes_final = StateBytes(model);
  Finalize(report, baselines);
  return report;
}

RunReport RunExperiment(const RunConfig& config) {
  const PreparedRun run = PrepareRun(config);
  return RunPrepared(config, run, RunBaselines(config, run));
}

Spread Summarize(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return {kNaN, kNaN, kNaN};
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  const double median =
      n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return {median, values.front(), values.back()};
}

RunConfig WithSeedOffset(const RunConfig& config, uint64_t offset) {
  RunConfig c = config;
  c.seeds.weights += offset;
  c.seeds.order += offset;
  c.seeds.synthetic += offset;
  c.network.seed = c.seeds.weights;
  c.task_split.order_seed = c.seeds.order;
  c.dataset.synthetic.seed = c.seeds.synthetic;
  return c;
}

Comparison CompareStyles(const std::vector<RunConfig>& configs, int repeats) {
  if (configs.empty()) throw ContractError("compare: no configs");
  if (repeats < 1) throw ContractError("compare: repeats must be >= 1");
  const auto shared = [](const RunConfig& c) {
    nlohmann::json j = RunConfigToJson(c);
    j.erase("style");
    j.erase("output_dir");
    j.erase("repeats");
    return j;
  };
  const nlohmann::json reference = shared(configs.front());
  for (size_t i = 1; i < configs.size(); ++i) {
    if (shared(configs[i]) != reference) {
      throw ContractError("compare: config " + std::to_string(i + 1) +
                          " differs from the first in more than its style");
    }
  }

  Comparison out;
  out.repeats = repeats;
  for (size_t i = 0; i < configs.size(); ++i) {
    StyleSummary s;
    s.style = configs[i].style;
    s.label = std::string(RegKindName(s.style.kind));
    if (s.style.kind == RegKind::kKf) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "(k=%.10g)", s.style.k);
      s.label += buf;
    }
    s.label = std::to_string(i + 1) + ":" + s.label;
    out.styles.push_back(std::move(s));
  }

  for (int r = 0; r < repeats; ++r) {
    const RunConfig base = WithSeedOffset(configs.front(), r);
    const PreparedRun run = PrepareRun(base);
    const auto baselines = RunBaselines(base, run);
    double offline = kNaN;
    for (const auto& b : baselines) {
      if (b.kind != BaselineKind::kOffline) continue;
      offline = 0.0;
      for (double a : b.task_accuracy) offline += a;
      offline /= static_cast<double>(b.task_accuracy.size());
    }
    for (size_t i = 0; i < configs.size(); ++i) {
      const RunReport rep =
          RunPrepared(WithSeedOffset(configs[i], r), run, baselines);
      StyleSummary& s = out.styles[i];
      s.acc.push_back(rep.acc);
      s.bwt.push_back(rep.bwt);
      s.fwt.push_back(rep.fwt);
      s.cum_regret.push_back(rep.cumulative_regret());
      s.final_acc_full.push_back(rep.final_acc_full());
      s.offline_acc.push_back(offline);
    }
  }
  return out;
}

}  // namespace otcil
