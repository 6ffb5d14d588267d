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

#include "otcil/rvfl.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "otcil/errors.h"

namespace otcil {

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "swish") return Activation::kSwish;
  throw ContractError("unknown activation: " + std::string(name));
}

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kSwish: return "swish";
  }
  return "relu";
}

EnsembleMode ParseEnsembleMode(std::string_view name) {
  if (name == "mean") return EnsembleMode::kMean;
  if (name == "median") return EnsembleMode::kMedian;
  throw ContractError("unknown ensemble mode: " + std::string(name));
}

std::string_view EnsembleModeName(EnsembleMode mode) {
  return mode == EnsembleMode::kMean ? "mean" : "median";
}

double NetworkConfig::lambda(int layer) const {
  if (lambdas.size() == 1) return lambdas.front();
  return lambdas.at(static_cast<size_t>(layer));
}

void NetworkConfig::Validate() const {
  if (layers < 1 || nodes < 1 || input_dim < 1 || classes < 1) {
    throw ContractError("NetworkConfig: L, N, s and m must all be >= 1");
  }
  if (lambdas.size() != 1 && lambdas.size() != static_cast<size_t>(layers)) {
    throw ContractError("NetworkConfig: need one lambda or one per layer");
  }
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ContractError("NetworkConfig: lambda must be positive");
    }
  }
}

RandomWeights InitRandomWeights(const NetworkConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  RandomWeights weights;
  weights.layers.reserve(config.layers);
  for (int l = 0; l < config.layers; ++l) {
    const Index rows = l == 0 ? config.input_dim : config.design_dim();
    Matrix w(rows, config.nodes);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < config.nodes; ++j) w(i, j) = uniform(rng);
    }
    weights.layers.push_back(std::move(w));
  }
  return weights;
}

void ApplyActivation(Activation activation, Matrix& v) {
  switch (activation) {
    case Activation::kRelu:
      v = v.cwiseMax(0.0);
      break;
    case Activation::kLeakyRelu:
      v = v.unaryExpr([](double x) { return x > 0.0 ? x : 0.01 * x; });
      break;
    case Activation::kSigmoid:
      v = v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
      break;
    case Activation::kTanh:
      v = v.array().tanh().matrix();
      break;
    case Activation::kSwish:
      v = v.unaryExpr([](double x) { return x / (1.0 + std::exp(-x)); });
      break;
  }
}

std::vector<FeatureBatch> ExtractFeatures(const Matrix& inputs,
                                          const RandomWeights& weights,
                                          const NetworkConfig& config,
                                          int64_t batch_index) {
  if (inputs.cols() != config.input_dim) {
    throw ContractError("ExtractFeatures: expected " +
                        std::to_string(config.input_dim) + " input columns");
  }
  if (weights.layers.size() != static_cast<size_t>(config.layers)) {
    throw ContractError("ExtractFeatures: weights do not match layer count");
  }
  if (!AllFinite(inputs)) {
    throw ContractError("ExtractFeatures: non-finite inputs");
  }
  const Index b = inputs.rows();
  const Index n = config.nodes;
  const Index s = config.input_dim;
  std::vector<FeatureBatch> out;
  out.reserve(config.layers);
  for (int l = 0; l < config.layers; ++l) {
    Matrix hidden = l == 0 ? Matrix(inputs * weights.layers[0])
                           : Matrix(out.back().design * weights.layers[l]);
    ApplyActivation(config.activation, hidden);
    if (!AllFinite(hidden)) {
      throw NumericalError("ExtractFeatures: non-finite activation in layer " +
                               std::to_string(l + 1),
                           batch_index, l);
    }
    FeatureBatch fb;
    fb.design.resize(b, n + s);
    fb.design.leftCols(n) = hidden;
    fb.design.rightCols(s) = inputs;
    fb.layer = l;
    fb.batch_index = batch_index;
    out.push_back(std::move(fb));
  }
  return out;
}

Matrix RowSoftmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Index j = 0; j < logits.cols(); ++j) {
      out(i, j) = std::exp(logits(i, j) - mx);
      sum += out(i, j);
    }
    out.row(i) /= sum;
  }
  return out;
}

Matrix FuseProbabilities(std::span<const Matrix> probabilities,
                         EnsembleMode mode) {
  if (probabilities.empty()) {
    throw ContractError("EnsembleDecision: empty learner list");
  }
  const Index rows = probabilities.front().rows();
  const Index cols = probabilities.front().cols();
  for (const Matrix& p : probabilities) {
    if (p.rows() != rows || p.cols() != cols) {
      throw ContractError("EnsembleDecision: learner shapes differ");
    }
  }
  const size_t count = probabilities.size();
  if (mode == EnsembleMode::kMean) {
    Matrix sum = Matrix::Zero(rows, cols);
    for (const Matrix& p : probabilities) sum += p;
    return sum / static_cast<double>(count);
  }
  Matrix out(rows, cols);
  std::vector<double> column(count);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      for (size_t l = 0; l < count; ++l) column[l] = probabilities[l](i, j);
      std::sort(column.begin(), column.end());
      out(i, j) = count % 2 == 1
                      ? column[count / 2]
                      : 0.5 * (column[count / 2 - 1] + column[count / 2]);
    }
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Matrix EnsembleDecision(std::span<const Matrix> logits, EnsembleMode mode) {
  if (logits.empty()) {
    throw ContractError("EnsembleDecision: empty learner list");
  }
  std::vector<Matrix> probs;
  probs.reserve(logits.size());
  for (const Matrix& z : logits) probs.push_back(RowSoftmax(z));
  return FuseProbabilities(probs, mode);
}

void InputStandardizer::Fit(const Matrix& inputs) {
  if (fitted_) return;
  if (inputs.rows() == 0) throw ContractError("InputStandardizer: empty batch");
  mean_ = inputs.colwise().mean();
  const Matrix centered = inputs.rowwise() - mean_;
  const Eigen::RowVectorXd var =
      centered.array().square().colwise().mean().matrix();
  inv_std_.resize(var.size());
  for (Index j = 0; j < var.size(); ++j) {
    inv_std_(j) = var(j) > 1e-24 ? 1.0 / std::sqrt(var(j)) : 1.0;
  }
  fitted_ = true;
}

Matrix InputStandardizer::Apply(const Matrix& inputs) const {
  if (!fitted_) return inputs;
  return ((inputs.rowwise() - mean_).array().rowwise() * inv_std_.array())
      .matrix();
}

}  // namespace otcil
