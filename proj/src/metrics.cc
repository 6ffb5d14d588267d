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

#include "otcil/metrics.h"

#include <cmath>
#include <limits>
#include <string>

#include "otcil/errors.h"

namespace otcil {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckSquare(const AccuracyMatrix& m) {
  if (m.r.rows() < 1 || m.r.rows() != m.r.cols()) {
    throw ContractError("accuracy matrix must be square with Q >= 1");
  }
}

void CheckLearners(std::span<const Matrix> layer_softmax,
                   const Matrix& targets) {
  if (layer_softmax.empty()) throw ContractError("need at least one learner");
  if (targets.rows() < 1) throw ContractError("empty test set");
  for (const Matrix& p : layer_softmax) {
    if (p.rows() != targets.rows() || p.cols() != targets.cols()) {
      throw ContractError("learner output shape differs from targets");
    }
  }
}

Matrix SumOf(std::span<const Matrix> mats) {
  Matrix sum = mats[0];
  for (size_t l = 1; l < mats.size(); ++l) sum += mats[l];
  return sum;
}

}  // namespace

AccuracyMatrix AccuracyMatrix::Undefined(int tasks) {
  if (tasks < 1) throw ContractError("accuracy matrix needs Q >= 1");
  AccuracyMatrix m;
  m.r = Matrix::Constant(tasks, tasks, kNaN);
  m.independent = Vector::Constant(tasks, kNaN);
  return m;
}

bool AccuracyMatrix::Defined(int after_task, int task) const {
  return task <= after_task && std::isfinite(r(after_task, task));
}

double ComputeAcc(const AccuracyMatrix& m) {
  CheckSquare(m);
  const int last = m.tasks() - 1;
  double sum = 0.0;
  for (int q = 0; q <= last; ++q) {
    if (!m.Defined(last, q)) {
      throw ContractError("ACC: R[Q, " + std::to_string(q + 1) +
                          "] is undefined");
    }
    sum += m.r(last, q);
  }
  return sum / m.tasks();
}

double ComputeBwt(const AccuracyMatrix& m) {
  CheckSquare(m);
  const int q_total = m.tasks();
  if (q_total < 2) throw ContractError("BWT is undefined for Q = 1");
  const int last = q_total - 1;
  double sum = 0.0;
  for (int q = 0; q < last; ++q) {
    if (!m.Defined(last, q) || !m.Defined(q, q)) {
      throw ContractError("BWT: R entry for task " + std::to_string(q + 1) +
                          " is undefined");
    }
    sum += m.r(last, q) - m.r(q, q);
  }
  return sum / (q_total - 1);
}

double ComputeFwt(const AccuracyMatrix& m) {
  CheckSquare(m);
  const int q_total = m.tasks();
  if (q_total < 2) throw ContractError("FWT is undefined for Q = 1");
  if (m.independent.size() != q_total) {
    throw ContractError("FWT: independent accuracies missing");
  }
  double sum = 0.0;
  for (int q = 1; q < q_total; ++q) {
    if (!m.Defined(q, q) || !std::isfinite(m.independent(q))) {
      throw ContractError("FWT: entry for task " + std::to_string(q + 1) +
                          " is undefined");
    }
    sum += m.r(q, q) - m.independent(q);
  }
  return sum / (q_total - 1);
}

std::vector<int> ArgmaxRows(const Matrix& scores) {
  std::vector<int> out(static_cast<size_t>(scores.rows()), 0);
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out[static_cast<size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double ImmediateAccuracy(const Matrix& probabilities, const Matrix& targets) {
  if (targets.rows() < 1) throw ContractError("empty test set");
  if (probabilities.rows() != targets.rows() ||
      probabilities.cols() != targets.cols()) {
    throw ContractError("prediction shape differs from targets");
  }
  const auto predicted = ArgmaxRows(probabilities);
  const auto truth = ArgmaxRows(targets);
  Index hits = 0;
  for (size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(targets.rows());
}

double SubsetAccuracy(std::span<const int> predicted,
                      std::span<const int> labels,
                      const std::vector<bool>& include_class) {
  if (predicted.size() != labels.size()) {
    throw ContractError("SubsetAccuracy: length mismatch");
  }
  int64_t rows = 0;
  int64_t hits = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= static_cast<int>(include_class.size()) ||
        !include_class[y]) {
      continue;
    }
    ++rows;
    hits += predicted[i] == y;
  }
  if (rows == 0) return kNaN;
  return static_cast<double>(hits) / static_cast<double>(rows);
}

double ImmediateRegret(std::span<const Matrix> layer_softmax,
                       const Matrix& targets) {
  CheckLearners(layer_softmax, targets);
  const double layers = static_cast<double>(layer_softmax.size());
  const double scale = layers * static_cast<double>(targets.rows());
  const Matrix residual = (SumOf(layer_softmax) - layers * targets) / scale;
  return residual.squaredNorm();
}

double ImmediateKl(std::span<const Matrix> layer_softmax,
                   const Matrix& targets) {
  CheckLearners(layer_softmax, targets);
  const double layers = static_cast<double>(layer_softmax.size());
  const Matrix sum = SumOf(layer_softmax);
  double total = 0.0;
  for (Index i = 0; i < targets.rows(); ++i) {
    for (Index j = 0; j < targets.cols(); ++j) {
      const double y = targets(i, j);
      if (y == 0.0) continue;
      total += y * std::log(layers * y / sum(i, j));
    }
  }
  return total / static_cast<double>(targets.rows());
}

void TraceSeries::Append(int64_t t, double acc_seen, double acc_full,
                         double regret, double kl) {
  running_ += regret;
  points_.push_back({t, acc_seen, acc_full, regret, running_, kl});
}

bool TraceSeries::CumulativeRegretNondecreasing() const {
  for (size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].cum_regret < points_[i - 1].cum_regret) return false;
  }
  return true;
}

}  // namespace otcil
