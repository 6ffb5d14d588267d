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

#ifndef OTCIL_METRICS_H_
#define OTCIL_METRICS_H_

// Task-matrix metrics (ACC, BWT, FWT) and per-batch test-set metrics.

#include <cstdint>
#include <span>
#include <vector>

#include "otcil/core_solver.h"

namespace otcil {

// R(i, j) is the accuracy on task j after learning task i (0-based). Entries
// above the diagonal and unknown independent accuracies are NaN.
struct AccuracyMatrix {
  Matrix r;
  Vector independent;

  static AccuracyMatrix Undefined(int tasks);
  int tasks() const { return static_cast<int>(r.rows()); }
  bool Defined(int after_task, int task) const;
};

double ComputeAcc(const AccuracyMatrix& m);
double ComputeBwt(const AccuracyMatrix& m);
double ComputeFwt(const AccuracyMatrix& m);

// Row argmax; ties go to the lowest column index.
std::vector<int> ArgmaxRows(const Matrix& scores);

double ImmediateAccuracy(const Matrix& probabilities, const Matrix& targets);

// Accuracy on the rows whose label is flagged in `include_class`; NaN when no
// row qualifies.
double SubsetAccuracy(std::span<const int> predicted,
                      std::span<const int> labels,
                      const std::vector<bool>& include_class);

double ImmediateRegret(std::span<const Matrix> layer_softmax,
                       const Matrix& targets);
double ImmediateKl(std::span<const Matrix> layer_softmax,
                   const Matrix& targets);

struct TracePoint {
  int64_t t = 0;
  double acc_seen = 0.0;
  double acc_full = 0.0;
  double regret = 0.0;
  double cum_regret = 0.0;
  double kl = 0.0;
};

struct KTraceEntry {
  int64_t t = 0;
  int layer = 0;
  double k_current = 0.0;
  double k_next = 0.0;
};

class TraceSeries {
 public:
  // Fills in cum_regret from the running sum.
  void Append(int64_t t, double acc_seen, double acc_full, double regret,
              double kl);
  void AppendK(const KTraceEntry& entry) { k_trace_.push_back(entry); }

  const std::vector<TracePoint>& points() const { return points_; }
  const std::vector<KTraceEntry>& k_trace() const { return k_trace_; }
  bool empty() const { return points_.empty(); }

  bool CumulativeRegretNondecreasing() const;

 private:
  std::vector<TracePoint> points_;
  std::vector<KTraceEntry> k_trace_;
  double running_ = 0.0;
};

}  // namespace otcil

#endif  // OTCIL_METRICS_H_
