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

#ifndef OTCIL_CONFIG_H_
#define OTCIL_CONFIG_H_

// RunConfig: the JSON experiment description. Field names in the file match
// the member names below.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "otcil/baselines.h"
#include "otcil/learners.h"
#include "otcil/parallel.h"
#include "otcil/rvfl.h"
#include "otcil/stream.h"

namespace otcil {

enum class DataSource { kSynthetic, kIdx, kCsv };
enum class Cadence { kEveryBatch, kEveryTask };

struct IdxPaths {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

struct CsvPaths {
  std::string train;
  std::string test;
  CsvSchema schema;
};

struct DatasetConfig {
  DataSource source = DataSource::kSynthetic;
  SyntheticSpec synthetic;
  IdxPaths idx;
  CsvPaths csv;
};

struct SeedSet {
  uint64_t weights = 0;
  uint64_t order = 0;
  uint64_t synthetic = 0;
};

struct RunConfig {
  DatasetConfig dataset;
  TaskSplitSpec task_split;
  int batch_size = 20;
  // input_dim and classes are filled in from the data at run time.
  NetworkConfig network;
  RegStyle style;
  Cadence cadence = Cadence::kEveryBatch;
  std::vector<BaselineKind> baselines = {
      BaselineKind::kOffline, BaselineKind::kSeparate, BaselineKind::kFineTune,
      BaselineKind::kNonIncremental};
  std::string output_dir = "out";
  SeedSet seeds;
  int repeats = 1;
  Execution execution = Execution::kParallel;

  // Throws ConfigError. Checks that referenced files exist.
  void Validate() const;
};

// Relative paths in the tree are resolved against `base_dir`. Unknown keys
// are rejected. Throws ConfigError.
RunConfig ParseRunConfig(const nlohmann::json& tree,
                         const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
nlohmann::json RunConfigToJson(const RunConfig& config);

SyntheticSpec ParseSyntheticSpec(const nlohmann::json& tree);
nlohmann::json SyntheticSpecToJson(const SyntheticSpec& spec);

std::string_view CadenceName(Cadence cadence);
std::string_view DataSourceName(DataSource source);

}  // namespace otcil

#endif  // OTCIL_CONFIG_H_
