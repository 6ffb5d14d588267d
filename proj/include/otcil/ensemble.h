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

#ifndef OTCIL_ENSEMBLE_H_
#define OTCIL_ENSEMBLE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "otcil/core_solver.h"
#include "otcil/learners.h"
#include "otcil/parallel.h"
#include "otcil/rvfl.h"

namespace otcil {

// Row count of one evaluation shard. Shards are the unit of OpenMP work and
// are identical in the serial and parallel paths.
inline constexpr Index kEvalShardRows = 256;

struct Evaluation {
  std::vector<Matrix> layer_probabilities;  // per-layer row softmax
  Matrix fused;                             // ensemble decision
};

// The edRVFL learner driven through the stream protocol
//   Prime(X_1); Observe(X_2, Y_1); ...; Observe(X_T, Y_{T-1});
//   ObserveLast(Y_T).
// Each call sees only the current labels and the next unlabeled inputs; the
// features of X_t are carried over from the previous call.
class OnlineEdRvfl {
 public:
  OnlineEdRvfl(const NetworkConfig& network, const RegStyle& style,
               Execution execution = Execution::kParallel);

  void Prime(const Matrix& first_inputs);
  // Returns the per-layer adaptive k pairs (empty unless style is kf_bayes).
  std::vector<AdaptiveKPair> Observe(const Matrix& next_inputs,
                                     const Matrix& targets);
  std::vector<AdaptiveKPair> ObserveLast(const Matrix& targets);

  std::vector<Matrix> LayerLogits(const Matrix& inputs) const;
  // Sharded evaluation; OpenMP over shards when execution is kParallel.
  Evaluation Evaluate(const Matrix& inputs) const;
  // Unsharded serial evaluation kept as the reference implementation.
  Evaluation EvaluateReference(const Matrix& inputs) const;

  const SubLearnerState& layer(int l) const { return layers_.at(l); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int64_t batches_consumed() const { return consumed_; }
  bool primed() const { return primed_; }
  const NetworkConfig& network() const { return network_; }
  const RegStyle& style() const { return style_; }
  const RandomWeights& weights() const { return weights_; }
  void set_execution(Execution execution) { execution_ = execution; }

 private:
  std::vector<AdaptiveKPair> StepLayers(const std::vector<FeatureBatch>& next,
                                        const Matrix& targets);
  Matrix Prepare(const Matrix& inputs) const;
  Evaluation EvaluateRows(const Matrix& inputs) const;

  NetworkConfig network_;
  RegStyle style_;
  Execution execution_;
  RandomWeights weights_;
  InputStandardizer standardizer_;
  std::vector<SubLearnerState> layers_;
  std::vector<FeatureBatch> current_;
  bool primed_ = false;
  bool finished_ = false;
  int64_t consumed_ = 0;
};

}  // namespace otcil

#endif  // OTCIL_ENSEMBLE_H_
