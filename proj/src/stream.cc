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

#include "otcil/stream.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "otcil/errors.h"

namespace otcil {
namespace {

std::vector<uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

uint32_t ReadBigEndian32(const std::vector<uint8_t>& bytes, size_t offset) {
  return (uint32_t{bytes[offset]} << 24) | (uint32_t{bytes[offset + 1]} << 16) |
         (uint32_t{bytes[offset + 2]} << 8) | uint32_t{bytes[offset + 3]};
}

struct IdxHeader {
  std::vector<uint32_t> dims;
  size_t data_offset = 0;
};

IdxHeader ParseIdxHeader(const std::vector<uint8_t>& bytes, uint8_t ndims,
                         const std::filesystem::path& path) {
  if (bytes.size() < 4) {
    throw FormatError(path.string() + ": truncated header, expected 4 bytes, got " +
                      std::to_string(bytes.size()));
  }
  if (bytes[0] != 0 || bytes[1] != 0 || bytes[2] != 0x08 || bytes[3] != ndims) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%02x%02x%02x%02x", bytes[0], bytes[1],
                  bytes[2], bytes[3]);
    throw FormatError(path.string() + ": bad magic " + buf +
                      " at offset 0, expected 0x000008" +
                      (ndims == 3 ? "03" : "01"));
  }
  IdxHeader h;
  h.data_offset = 4 + 4 * size_t{ndims};
  if (bytes.size() < h.data_offset) {
    throw FormatError(path.string() + ": truncated header, expected " +
                      std::to_string(h.data_offset) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  size_t payload = 1;
  for (uint8_t i = 0; i < ndims; ++i) {
    h.dims.push_back(ReadBigEndian32(bytes, 4 + 4 * size_t{i}));
    payload *= h.dims.back();
  }
  const size_t expected = h.data_offset + payload;
  if (bytes.size() < expected) {
    throw FormatError(path.string() + ": truncated file, expected " +
                      std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  return h;
}

std::string_view Trim(std::string_view s) {
  const auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      break;
    }
    out.push_back(Trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Task GatherRows(const LabeledDataset& d, const std::vector<int>& classes,
                std::vector<Index> rows) {
  Task task;
  task.classes = classes;
  task.features.resize(static_cast<Index>(rows.size()), d.dim());
  task.labels.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    task.features.row(static_cast<Index>(i)) = d.features.row(rows[i]);
    task.labels.push_back(d.labels[rows[i]]);
  }
  return task;
}

std::vector<Index> RowsOfClasses(const LabeledDataset& d,
                                 const std::vector<int>& classes) {
  std::vector<Index> rows;
  for (Index i = 0; i < d.size(); ++i) {
    if (std::find(classes.begin(), classes.end(), d.labels[i]) !=
        classes.end()) {
      rows.push_back(i);
    }
  }
  return rows;
}

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void FnvMix(uint64_t& h, const void* data, size_t n) {
  const auto* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

void LabeledDataset::Validate() const {
  if (features.rows() < 1) throw ContractError("dataset is empty");
  if (static_cast<Index>(labels.size()) != features.rows()) {
    throw ContractError("dataset: label count differs from row count");
  }
  if (classes < 1) throw ContractError("dataset: class load must be >= 1");
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw ContractError("dataset: label " + std::to_string(y) +
                          " outside [0, " + std::to_string(classes) + ")");
    }
  }
  if (!AllFinite(features)) throw ContractError("dataset: non-finite feature");
}

LabeledDataset LoadIdx(const std::filesystem::path& images,
                       const std::filesystem::path& labels, Split split) {
  const auto image_bytes = ReadBytes(images);
  const auto label_bytes = ReadBytes(labels);
  const IdxHeader ih = ParseIdxHeader(image_bytes, 3, images);
  const IdxHeader lh = ParseIdxHeader(label_bytes, 1, labels);
  const Index n = ih.dims[0];
  const Index s = Index{ih.dims[1]} * Index{ih.dims[2]};
  if (Index{lh.dims[0]} != n) {
    throw FormatError("IDX label count " + std::to_string(lh.dims[0]) +
                      " does not match image count " + std::to_string(n));
  }
  LabeledDataset d;
  d.split = split;
  d.features.resize(n, s);
  d.labels.resize(n);
  const uint8_t* pix = image_bytes.data() + ih.data_offset;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < s; ++j) d.features(i, j) = pix[i * s + j] / 255.0;
    d.labels[i] = label_bytes[lh.data_offset + i];
  }
  d.classes = n > 0 ? *std::max_element(d.labels.begin(), d.labels.end()) + 1
                    : 0;
  return d;
}

LabeledDataset LoadCsvFeatures(const std::filesystem::path& path,
                               const CsvSchema& schema, Split split) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  size_t line_no = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 &&
        line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (Trim(line).empty()) continue;
    if (schema.header && line_no == 1) continue;
    const auto fields = SplitFields(line, schema.delimiter);
    if (width == 0) {
      width = fields.size();
      if (width < 2) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": need at least one feature and a label");
      }
    } else if (fields.size() != width) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": ragged row, expected " + std::to_string(width) +
                        " fields, got " + std::to_string(fields.size()));
    }
    const int label_col = schema.label_column < 0
                              ? static_cast<int>(width) + schema.label_column
                              : schema.label_column;
    if (label_col < 0 || label_col >= static_cast<int>(width)) {
      throw FormatError(path.string() + ": label column out of range");
    }
    std::vector<double> values;
    values.reserve(width - 1);
    for (size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!ParseDouble(fields[c], v) || !std::isfinite(v)) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": non-numeric cell '" + std::string(fields[c]) +
                          "' in column " + std::to_string(c + 1));
      }
      if (static_cast<int>(c) == label_col) {
        if (v < 0 || v != std::floor(v)) {
          throw FormatError(path.string() + ":" + std::to_string(line_no) +
                            ": label must be a nonnegative integer");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw FormatError(path.string() + ": no data rows");

  LabeledDataset d;
  d.split = split;
  d.features.resize(static_cast<Index>(rows.size()),
                    static_cast<Index>(width - 1));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      d.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  d.labels = std::move(labels);
  const int inferred = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  d.classes = schema.classes > 0 ? schema.classes : inferred;
  if (inferred > d.classes) {
    throw FormatError(path.string() + ": label exceeds the declared class load");
  }
  return d;
}

void WriteCsvFeatures(const LabeledDataset& dataset,
                      const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Index i = 0; i < dataset.size(); ++i) {
    for (Index j = 0; j < dataset.dim(); ++j) {
      out << FormatDouble(dataset.features(i, j)) << delimiter;
    }
    out << dataset.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::vector<int>> ClassGroups(int classes,
                                          const TaskSplitSpec& spec) {
  if (spec.tasks < 1 || classes % spec.tasks != 0) {
    throw ContractError("task count " + std::to_string(spec.tasks) +
                        " does not divide class load " +
                        std::to_string(classes));
  }
  std::vector<int> order(classes);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.order_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int per_task = classes / spec.tasks;
  std::vector<std::vector<int>> groups(spec.tasks);
  for (int q = 0; q < spec.tasks; ++q) {
    groups[q].assign(order.begin() + q * per_task,
                     order.begin() + (q + 1) * per_task);
  }
  return groups;
}

std::vector<Task> SplitClassIncremental(const LabeledDataset& dataset,
                                        const TaskSplitSpec& spec) {
  dataset.Validate();
  const auto groups = ClassGroups(dataset.classes, spec);
  // Separate stream for row shuffles so the class order is independent of it.
  std::mt19937_64 rng(spec.order_seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  std::vector<Task> tasks;
  tasks.reserve(groups.size());
  for (const auto& group : groups) {
    std::vector<Index> rows = RowsOfClasses(dataset, group);
    if (spec.shuffle_within_task) {
      std::shuffle(rows.begin(), rows.end(), rng);
    } else {
      std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) {
        return dataset.labels[a] < dataset.labels[b];
      });
    }
    tasks.push_back(GatherRows(dataset, group, std::move(rows)));
  }
  return tasks;
}

std::vector<Task> PartitionByGroups(
    const LabeledDataset& dataset,
    const std::vector<std::vector<int>>& groups) {
  std::vector<Task> tasks;
  tasks.reserve(groups.size());
  for (const auto& group : groups) {
    tasks.push_back(GatherRows(dataset, group, RowsOfClasses(dataset, group)));
  }
  return tasks;
}

Matrix OneHot(std::span<const int> labels, int classes) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw ContractError("OneHot: label outside the class load");
    }
    y(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return y;
}

BoundaryAnnotations::BoundaryAnnotations(const BoundaryAnnotations& other)
    : task_of_batch_(other.task_of_batch_),
      reads_(other.reads_.load()),
      learner_reads_(other.learner_reads_.load()) {}

BoundaryAnnotations& BoundaryAnnotations::operator=(
    const BoundaryAnnotations& other) {
  task_of_batch_ = other.task_of_batch_;
  reads_ = other.reads_.load();
  learner_reads_ = other.learner_reads_.load();
  return *this;
}

void BoundaryAnnotations::CountRead() const {
  reads_.fetch_add(1);
  if (learner_active_.load() > 0) learner_reads_.fetch_add(1);
}

int BoundaryAnnotations::TaskOf(int64_t batch) const {
  CountRead();
  return task_of_batch_.at(static_cast<size_t>(batch));
}

bool BoundaryAnnotations::EndsTask(int64_t batch) const {
  CountRead();
  const size_t i = static_cast<size_t>(batch);
  return i + 1 == task_of_batch_.size() ||
         task_of_batch_.at(i) != task_of_batch_.at(i + 1);
}

Index BatchStream::total_rows() const {
  Index n = 0;
  for (const auto& b : batches) n += b.inputs.rows();
  return n;
}

uint64_t BatchStream::Hash() const {
  uint64_t h = kFnvOffset;
  for (const auto& b : batches) {
    const int64_t shape[3] = {b.inputs.rows(), b.inputs.cols(),
                              b.targets.cols()};
    FnvMix(h, shape, sizeof(shape));
    FnvMix(h, b.inputs.data(), sizeof(double) * b.inputs.size());
    FnvMix(h, b.targets.data(), sizeof(double) * b.targets.size());
  }
  return h;
}

BatchStream Batchify(const std::vector<Task>& tasks, int batch_size,
                     int classes) {
  if (batch_size < 1) throw ContractError("Batchify: batch size must be >= 1");
  BatchStream stream;
  stream.batch_size = batch_size;
  stream.classes = classes;
  std::vector<int> task_of_batch;
  for (size_t q = 0; q < tasks.size(); ++q) {
    const Task& task = tasks[q];
    const Index n = task.features.rows();
    for (Index start = 0; start < n; start += batch_size) {
      const Index count = std::min<Index>(batch_size, n - start);
      StreamBatch batch;
      batch.inputs = task.features.middleRows(start, count);
      batch.targets = OneHot(
          std::span<const int>(task.labels).subspan(start, count), classes);
      batch.short_batch = count < batch_size;
      stream.batches.push_back(std::move(batch));
      task_of_batch.push_back(static_cast<int>(q));
    }
  }
  stream.annotations = BoundaryAnnotations(std::move(task_of_batch));
  return stream;
}

std::pair<LabeledDataset, LabeledDataset> MakeGaussianClusters(
    const SyntheticSpec& spec) {
  if (spec.classes < 1 || spec.dims < 1 || spec.samples_per_class < 1 ||
      spec.test_per_class < 0) {
    throw ContractError("synthetic spec: sizes must be positive");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix centers(spec.classes, spec.dims);
  for (int k = 0; k < spec.classes; ++k) {
    for (int j = 0; j < spec.dims; ++j) centers(k, j) = normal(rng);
    centers.row(k) *= spec.separation / centers.row(k).norm();
  }
  const auto sample = [&](int per_class, Split split) {
    LabeledDataset d;
    d.split = split;
    d.classes = spec.classes;
    d.features.resize(static_cast<Index>(per_class) * spec.classes, spec.dims);
    Index row = 0;
    for (int k = 0; k < spec.classes; ++k) {
      for (int i = 0; i < per_class; ++i, ++row) {
        for (int j = 0; j < spec.dims; ++j) {
          d.features(row, j) = centers(k, j) + normal(rng);
        }
        d.labels.push_back(k);
      }
    }
    return d;
  };
  LabeledDataset train = sample(spec.samples_per_class, Split::kTrain);
  LabeledDataset test = sample(spec.test_per_class, Split::kTest);
  return {std::move(train), std::move(test)};
}

}  // namespace otcil
