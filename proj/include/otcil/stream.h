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

#ifndef OTCIL_STREAM_H_
#define OTCIL_STREAM_H_

// Dataset ingestion and construction of boundary-free class-incremental
// batch streams. Task identity lives only in BoundaryAnnotations, which the
// learner-facing batch type does not reference.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "otcil/core_solver.h"

namespace otcil {

enum class Split { kTrain, kTest };

struct LabeledDataset {
  Matrix features;          // n x s
  std::vector<int> labels;  // n values in [0, classes)
  int classes = 0;
  Split split = Split::kTrain;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  // Throws ContractError.
  void Validate() const;
};

// Reads an IDX image file (magic 0x00000803) and its companion label file
// (magic 0x00000801). Pixels are scaled by 1/255. The class load is
// max(label) + 1.
LabeledDataset LoadIdx(const std::filesystem::path& images,
                       const std::filesystem::path& labels,
                       Split split = Split::kTrain);

struct CsvSchema {
  int label_column = -1;  // negative counts from the end
  char delimiter = ',';
  bool header = false;
  int classes = 0;        // 0 infers max(label) + 1
};

LabeledDataset LoadCsvFeatures(const std::filesystem::path& path,
                               const CsvSchema& schema,
                               Split split = Split::kTrain);

// Features in file order followed by the label as the last column, with
// 17 significant digits.
void WriteCsvFeatures(const LabeledDataset& dataset,
                      const std::filesystem::path& path, char delimiter = ',');

struct TaskSplitSpec {
  int tasks = 1;                   // Q, must divide the class load
  uint64_t order_seed = 0;
  bool shuffle_within_task = true;
  int batches_per_class = 0;       // optional batch sizing hint
};

struct Task {
  std::vector<int> classes;
  Matrix features;
  std::vector<int> labels;
};

// Random partition of [0, classes) into Q groups of classes / Q.
std::vector<std::vector<int>> ClassGroups(int classes,
                                          const TaskSplitSpec& spec);

// Training tasks in group order; rows shuffled within each task unless
// disabled (then rows are sorted by class).
std::vector<Task> SplitClassIncremental(const LabeledDataset& dataset,
                                        const TaskSplitSpec& spec);

// Rows of `dataset` grouped by the given class groups, in dataset order.
std::vector<Task> PartitionByGroups(
    const LabeledDataset& dataset,
    const std::vector<std::vector<int>>& groups);

Matrix OneHot(std::span<const int> labels, int classes);

// What the learner receives: inputs and one-hot targets, nothing else.
struct StreamBatch {
  Matrix inputs;   // b x s
  Matrix targets;  // b x m
  bool short_batch = false;
};

// Per-batch task index, kept out of the learner path. Reads made while a
// LearnerScope is open are counted so reports can prove there were none.
class BoundaryAnnotations {
 public:
  BoundaryAnnotations() = default;
  explicit BoundaryAnnotations(std::vector<int> task_of_batch)
      : task_of_batch_(std::move(task_of_batch)) {}
  BoundaryAnnotations(const BoundaryAnnotations& other);
  BoundaryAnnotations& operator=(const BoundaryAnnotations& other);

  int TaskOf(int64_t batch) const;
  // True when `batch` is the last batch of its task.
  bool EndsTask(int64_t batch) const;
  int64_t size() const { return static_cast<int64_t>(task_of_batch_.size()); }

  int64_t reads() const { return reads_.load(); }
  int64_t learner_reads() const { return learner_reads_.load(); }

  class LearnerScope {
   public:
    explicit LearnerScope(const BoundaryAnnotations& a) : a_(a) {
      a_.learner_active_.fetch_add(1);
    }
    ~LearnerScope() { a_.learner_active_.fetch_sub(1); }
    LearnerScope(const LearnerScope&) = delete;
    LearnerScope& operator=(const LearnerScope&) = delete;

   private:
    const BoundaryAnnotations& a_;
  };

 private:
  void CountRead() const;

  std::vector<int> task_of_batch_;
  mutable std::atomic<int64_t> reads_{0};
  mutable std::atomic<int64_t> learner_reads_{0};
  mutable std::atomic<int> learner_active_{0};
};

struct BatchStream {
  std::vector<StreamBatch> batches;
  BoundaryAnnotations annotations;
  int batch_size = 1;
  int classes = 0;

  int64_t size() const { return static_cast<int64_t>(batches.size()); }
  Index total_rows() const;
  // FNV-1a over shapes and the raw bytes of every batch.
  uint64_t Hash() const;
};

// Cuts each task into batches of `batch_size` rows (the final batch of a task
// may be short) and concatenates them in task order.
BatchStream Batchify(const std::vector<Task>& tasks, int batch_size,
                     int classes);

struct SyntheticSpec {
  int classes = 10;
  int dims = 16;
  double separation = 4.0;
  int samples_per_class = 100;
  int test_per_class = 50;
  uint64_t seed = 0;
};

// Gaussian clusters: center_k = separation * (unit random direction), unit
// isotropic noise. Returns {train, test}.
std::pair<LabeledDataset, LabeledDataset> MakeGaussianClusters(
    const SyntheticSpec& spec);

}  // namespace otcil

#endif  // OTCIL_STREAM_H_
