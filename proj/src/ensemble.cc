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

#include "otcil/ensemble.h"

#include <algorithm>
#include <string>

#include "otcil/errors.h"

namespace otcil {

OnlineEdRvfl::OnlineEdRvfl(const NetworkConfig& network, const RegStyle& style,
                           Execution execution)
    : network_(network), style_(style), execution_(execution) {
  network_.Validate();
  style_.Validate();
  weights_ = InitRandomWeights(network_);
  layers_.reserve(network_.layers);
  for (int l = 0; l < network_.layers; ++l) {
    layers_.push_back(SubLearnerState::Create(
        network_.design_dim(), network_.classes, network_.lambda(l), style_,
        network_.seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(l + 1)));
  }
}

Matrix OnlineEdRvfl::Prepare(const Matrix& inputs) const {
  return standardizer_.Apply(inputs);
}

void OnlineEdRvfl::Prime(const Matrix& first_inputs) {
  if (primed_) throw ContractError("OnlineEdRvfl: already primed");
  if (network_.standardize_inputs) standardizer_.Fit(first_inputs);
  current_ = ExtractFeatures(Prepare(first_inputs), weights_, network_, 1);
  primed_ = true;
}

std::vector<AdaptiveKPair> OnlineEdRvfl::StepLayers(
    const std::vector<FeatureBatch>& next, const Matrix& targets) {
  if (!primed_ || finished_) {
    throw ContractError("OnlineEdRvfl: stream protocol violated");
  }
  const int n = num_layers();
  const bool adaptive = style_.kind == RegKind::kKfBayes;
  std::vector<AdaptiveKPair> ks(adaptive ? n : 0);
  const Matrix empty(0, network_.design_dim());
  const int64_t batch = consumed_ + 1;
  ForEachIndex(n, execution_, [&](int l) {
    const Matrix& next_design = next.empty() ? empty : next[l].design;
    try {
      auto k = Step(layers_[l], current_[l].design, targets, next_design);
      if (adaptive) ks[l] = *k;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " [layer " +
                               std::to_string(l + 1) + ", style " +
                               std::string(RegKindName(style_.kind)) + "]",
                           batch, l);
    }
  });
  ++consumed_;
  return ks;
}

std::vector<AdaptiveKPair> OnlineEdRvfl::Observe(const Matrix& next_inputs,
                                                 const Matrix& targets) {
  if (!primed_) throw ContractError("OnlineEdRvfl: Observe before Prime");
  std::vector<FeatureBatch> next = ExtractFeatures(
      Prepare(next_inputs), weights_, network_, consumed_ + 2);
  auto ks = StepLayers(next, targets);
  current_ = std::move(next);
  return ks;
}

std::vector<AdaptiveKPair> OnlineEdRvfl::ObserveLast(const Matrix& targets) {
  auto ks = StepLayers({}, targets);
  finished_ = true;
  current_.clear();
  return ks;
}

std::vector<Matrix> OnlineEdRvfl::LayerLogits(const Matrix& inputs) const {
  const auto features = ExtractFeatures(Prepare(inputs), weights_, network_);
  std::vector<Matrix> logits;
  logits.reserve(features.size());
  for (size_t l = 0; l < features.size(); ++l) {
    logits.push_back(features[l].design * layers_[l].theta);
  }
  return logits;
}

Evaluation OnlineEdRvfl::EvaluateRows(const Matrix& inputs) const {
  Evaluation ev;
  for (const Matrix& z : LayerLogits(inputs)) {
    ev.layer_probabilities.push_back(RowSoftmax(z));
  }
  ev.fused = FuseProbabilities(ev.layer_probabilities, network_.ensemble);
  return ev;
}

Evaluation OnlineEdRvfl::EvaluateReference(const Matrix& inputs) const {
  return EvaluateRows(inputs);
}

Evaluation OnlineEdRvfl::Evaluate(const Matrix& inputs) const {
  const Index rows = inputs.rows();
  const int shards =
      static_cast<int>((rows + kEvalShardRows - 1) / kEvalShardRows);
  std::vector<Evaluation> parts(shards);
  ForEachIndex(shards, execution_, [&](int i) {
    const Index begin = static_cast<Index>(i) * kEvalShardRows;
    const Index count = std::min(kEvalShardRows, rows - begin);
    parts[i] = EvaluateRows(inputs.middleRows(begin, count));
  });

  Evaluation ev;
  const int n = num_layers();
  const Index m = network_.classes;
  ev.layer_probabilities.assign(n, Matrix(rows, m));
  ev.fused.resize(rows, m);
  for (int i = 0; i < shards; ++i) {
    const Index begin = static_cast<Index>(i) * kEvalShardRows;
    const Index count = parts[i].fused.rows();
    for (int l = 0; l < n; ++l) {
      ev.layer_probabilities[l].middleRows(begin, count) =
          parts[i].layer_probabilities[l];
    }
    ev.fused.middleRows(begin, count) = parts[i].fused;
  }
  return ev;
}

}  // namespace otcil
