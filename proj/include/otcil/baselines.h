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

#ifndef OTCIL_BASELINES_H_
#define OTCIL_BASELINES_H_

// Non-continual reference models. Unlike the online learners these may read
// task annotations.

#include <string_view>
#include <vector>

#include "otcil/core_solver.h"
#include "otcil/rvfl.h"
#include "otcil/stream.h"

namespace otcil {

enum class BaselineKind { kOffline, kSeparate, kFineTune, kNonIncremental };

BaselineKind ParseBaselineKind(std::string_view name);
std::string_view BaselineKindName(BaselineKind kind);

struct BaselineRecord {
  BaselineKind kind = BaselineKind::kOffline;
  // Accuracy on the full test set. For kSeparate, the sample-weighted mean of
  // the per-task accuracies, since each expert only answers for its own task.
  double accuracy = 0.0;
  std::vector<double> task_accuracy;  // one entry per task
};

// Closed-form ridge edRVFL over fixed random weights.
class StaticEdRvfl {
 public:
  // `reference_inputs` fits the input standardizer when it is enabled.
  StaticEdRvfl(const NetworkConfig& network, const Matrix& reference_inputs);

  void Fit(const Matrix& inputs, const Matrix& targets);
  Matrix Predict(const Matrix& inputs) const;

 private:
  NetworkConfig network_;
  RandomWeights weights_;
  InputStandardizer standardizer_;
  std::vector<Matrix> thetas_;
};

// `task_classes[q]` lists the classes of task q; test rows are assigned to
// tasks by label. Throws ContractError when the stream lacks annotations.
BaselineRecord FitBaseline(BaselineKind kind, const BatchStream& stream,
                           const LabeledDataset& test,
                           const std::vector<std::vector<int>>& task_classes,
                           const NetworkConfig& network);

}  // namespace otcil

#endif  // OTCIL_BASELINES_H_
