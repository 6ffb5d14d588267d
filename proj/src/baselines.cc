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

#include "otcil/baselines.h"

#include <algorithm>
#include <string>

#include "otcil/errors.h"
#include "otcil/metrics.h"

namespace otcil {
namespace {

struct Rows {
  Matrix inputs;
  Matrix targets;
};

Rows Stack(const std::vector<const StreamBatch*>& batches, Index dim,
           Index classes) {
  Index n = 0;
  for (const StreamBatch* b : batches) n += b->inputs.rows();
  Rows rows{Matrix(n, dim), Matrix(n, classes)};
  Index at = 0;
  for (const StreamBatch* b : batches) {
    rows.inputs.middleRows(at, b->inputs.rows()) = b->inputs;
    rows.targets.middleRows(at, b->targets.rows()) = b->targets;
    at += b->inputs.rows();
  }
  return rows;
}

std::vector<Rows> RowsPerTask(const BatchStream& stream, int tasks) {
  std::vector<std::vector<const StreamBatch*>> grouped(tasks);
  for (int64_t t = 0; t < stream.size(); ++t) {
    const int q = stream.annotations.TaskOf(t);
    if (q < 0 || q >= tasks) {
      throw ContractError("baseline: annotation names task " +
                          std::to_string(q) + " outside the task list");
    }
    grouped[q].push_back(&stream.batches[t]);
  }
  const Index dim = stream.batches.front().inputs.cols();
  std::vector<Rows> out;
  for (const auto& g : grouped) out.push_back(Stack(g, dim, stream.classes));
  return out;
}

// Test-set rows of each task, selected by label.
std::vector<std::vector<Index>> TestRowsPerTask(
    const LabeledDataset& test,
    const std::vector<std::vector<int>>& task_classes) {
  std::vector<std::vector<Index>> rows(task_classes.size());
  for (Index i = 0; i < test.size(); ++i) {
    for (size_t q = 0; q < task_classes.size(); ++q) {
      const auto& c = task_classes[q];
      if (std::find(c.begin(), c.end(), test.labels[i]) != c.end()) {
        rows[q].push_back(i);
      }
    }
  }
  return rows;
}

double AccuracyOn(const std::vector<int>& predicted,
                  const std::vector<int>& labels,
                  const std::vector<Index>& rows) {
  if (rows.empty()) return 0.0;
  Index hits = 0;
  for (Index i : rows) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

}  // namespace

BaselineKind ParseBaselineKind(std::string_view name) {
  if (name == "offline") return BaselineKind::kOffline;
  if (name == "separate") return BaselineKind::kSeparate;
  if (name == "fine_tune") return BaselineKind::kFineTune;
  if (name == "non_incremental") return BaselineKind::kNonIncremental;
  throw ContractError("unknown baseline: " + std::string(name));
}

std::string_view BaselineKindName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kOffline: return "offline";
    case BaselineKind::kSeparate: return "separate";
    case BaselineKind::kFineTune: return "fine_tune";
    case BaselineKind::kNonIncremental: return "non_incremental";
  }
  return "offline";
}

StaticEdRvfl::StaticEdRvfl(const NetworkConfig& network,
                           const Matrix& reference_inputs)
    : network_(network) {
  network_.Validate();
  weights_ = InitRandomWeights(network_);
  if (network_.standardize_inputs) standardizer_.Fit(reference_inputs);
}

void StaticEdRvfl::Fit(const Matrix& inputs, const Matrix& targets) {
  const auto features =
      ExtractFeatures(standardizer_.Apply(inputs), weights_, network_);
  thetas_.clear();
  for (int l = 0; l < network_.layers; ++l) {
    thetas_.push_back(
        OfflineRidgeFit(features[l].design, targets, network_.lambda(l)).theta);
  }
}

Matrix StaticEdRvfl::Predict(const Matrix& inputs) const {
  if (thetas_.empty()) throw ContractError("StaticEdRvfl: not fitted");
  const auto features =
      ExtractFeatures(standardizer_.Apply(inputs), weights_, network_);
  std::vector<Matrix> logits;
  for (int l = 0; l < network_.layers; ++l) {
    logits.push_back(features[l].design * thetas_[l]);
  }
  return EnsembleDecision(logits, network_.ensemble);
}

BaselineRecord FitBaseline(BaselineKind kind, const BatchStream& stream,
                           const LabeledDataset& test,
                           const std::vector<std::vector<int>>& task_classes,
                           const NetworkConfig& network) {
  if (stream.size() == 0) throw ContractError("baseline: empty stream");
  if (stream.annotations.size() != stream.size()) {
    throw ContractError("baseline: stream carries no task annotations");
  }
  const int tasks = static_cast<int>(task_classes.size());
  const std::vector<Rows> train = RowsPerTask(stream, tasks);
  const auto test_rows = TestRowsPerTask(test, task_classes);
  StaticEdRvfl model(network, stream.batches.front().inputs);

  BaselineRecord record;
  record.kind = kind;
  record.task_accuracy.assign(tasks, 0.0);
  const auto score_all = [&](const StaticEdRvfl& m) {
    const auto predicted = ArgmaxRows(m.Predict(test.features));
    Index hits = 0;
    for (Index i = 0; i < test.size(); ++i) {
      hits += predicted[i] == test.labels[i];
    }
    record.accuracy =
        static_cast<double>(hits) / static_cast<double>(test.size());
    for (int q = 0; q < tasks; ++q) {
      record.task_accuracy[q] = AccuracyOn(predicted, test.labels, test_rows[q]);
    }
  };

  switch (kind) {
    case BaselineKind::kOffline: {
      std::vector<const StreamBatch*> all;
      for (const auto& b : stream.batches) all.push_back(&b);
      const Rows rows =
          Stack(all, stream.batches.front().inputs.cols(), stream.classes);
      model.Fit(rows.inputs, rows.targets);
      score_all(model);
      break;
    }
    case BaselineKind::kFineTune:
      for (const Rows& rows : train) {
        if (rows.inputs.rows() > 0) model.Fit(rows.inputs, rows.targets);
      }
      score_all(model);
      break;
    case BaselineKind::kNonIncremental:
      model.Fit(train.front().inputs, train.front().targets);
      score_all(model);
      break;
    case BaselineKind::kSeparate: {
      Index hits = 0;
      Index total = 0;
      for (int q = 0; q < tasks; ++q) {
        if (train[q].inputs.rows() == 0) continue;
        model.Fit(train[q].inputs, train[q].targets);
        const auto predicted = ArgmaxRows(model.Predict(test.features));
        record.task_accuracy[q] =
            AccuracyOn(predicted, test.labels, test_rows[q]);
        for (Index i : test_rows[q]) hits += predicted[i] == test.labels[i];
        total += static_cast<Index>(test_rows[q].size());
      }
      record.accuracy =
          total > 0 ? static_cast<double>(hits) / static_cast<double>(total)
                    : 0.0;
      break;
    }
  }
  return record;
}

}  // namespace otcil
