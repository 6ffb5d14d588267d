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

#ifndef OTCIL_RVFL_H_
#define OTCIL_RVFL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otcil/core_solver.h"

namespace otcil {

enum class Activation { kRelu, kLeakyRelu, kSigmoid, kTanh, kSwish };
enum class EnsembleMode { kMean, kMedian };

Activation ParseActivation(std::string_view name);
std::string_view ActivationName(Activation a);
EnsembleMode ParseEnsembleMode(std::string_view name);
std::string_view EnsembleModeName(EnsembleMode mode);

struct NetworkConfig {
  int layers = 1;       // L
  int nodes = 16;       // N, hidden nodes per layer
  int input_dim = 1;    // s
  int classes = 2;      // m, fixed class load
  Activation activation = Activation::kRelu;
  // One value shared by every layer, or one per layer.
  std::vector<double> lambdas = {1.0};
  uint64_t seed = 0;
  bool standardize_inputs = false;
  EnsembleMode ensemble = EnsembleMode::kMean;

  // Width of every layer's design matrix, s + N.
  int design_dim() const { return input_dim + nodes; }
  double lambda(int layer) const;
  // Throws ContractError.
  void Validate() const;
};

// Fixed hidden weights. layers[0] is s x N, the rest are (s + N) x N.
struct RandomWeights {
  std::vector<Matrix> layers;
};

// Per-layer design matrix [H_l | X] for one batch.
struct FeatureBatch {
  Matrix design;
  int layer = 0;
  int64_t batch_index = -1;
};

// Uniform(-1, 1) entries from a mt19937_64 seeded with config.seed, filled
// layer by layer in row-major order.
RandomWeights InitRandomWeights(const NetworkConfig& config);

void ApplyActivation(Activation activation, Matrix& values);

// Computes D_l = [g(D_{l-1, hidden} | X) W_l | X] for l = 1..L in layer order.
std::vector<FeatureBatch> ExtractFeatures(const Matrix& inputs,
                                          const RandomWeights& weights,
                                          const NetworkConfig& config,
                                          int64_t batch_index = -1);

// Numerically stable row-wise softmax.
Matrix RowSoftmax(const Matrix& logits);

// Per-learner softmax followed by an element-wise mean or median across
// learners. Median outputs are renormalized per row.
Matrix EnsembleDecision(std::span<const Matrix> logits, EnsembleMode mode);
// Same fusion applied to already-normalized per-learner probabilities.
Matrix FuseProbabilities(std::span<const Matrix> probabilities,
                         EnsembleMode mode);

// Per-feature z-score frozen after the first Fit().
class InputStandardizer {
 public:
  void Fit(const Matrix& inputs);
  bool fitted() const { return fitted_; }
  Matrix Apply(const Matrix& inputs) const;

 private:
  bool fitted_ = false;
  Eigen::RowVectorXd mean_;
  Eigen::RowVectorXd inv_std_;
};

}  // namespace otcil

#endif  // OTCIL_RVFL_H_
