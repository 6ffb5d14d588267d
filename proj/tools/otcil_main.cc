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

// Command-line front end.
//
//   otcil run --config run.json [--out DIR]
//   otcil compare --configs a.json b.json ... [--repeats N] [--out DIR]
//   otcil bake-synthetic --spec spec.json [--out DIR]
//
// Exit status: 0 on success, 2 on configuration or input errors, 3 on a
// numerical failure (the partial report is still written), 1 otherwise.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otcil/config.h"
#include "otcil/errors.h"
#include "otcil/experiment.h"
#include "otcil/report_io.h"
#include "otcil/stream.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void PrintSummary(const otcil::RunReport& r, const std::string& dir) {
  std::printf("batches=%lld tasks=%d acc=%s bwt=%s fwt=%s final_acc_full=%s "
              "cum_regret=%s -> %s\n",
              static_cast<long long>(r.batches), r.tasks,
              otcil::FormatReal(r.acc).c_str(),
              otcil::FormatReal(r.bwt).c_str(),
              otcil::FormatReal(r.fwt).c_str(),
              otcil::FormatReal(r.final_acc_full()).c_str(),
              otcil::FormatReal(r.cumulative_regret()).c_str(), dir.c_str());
}

int Run(const std::string& config_path, const std::string& out) {
  const otcil::RunConfig config = otcil::LoadRunConfig(config_path);
  const std::string dir = out.empty() ? config.output_dir : out;
  try {
    const otcil::RunReport report = otcil::RunExperiment(config);
    otcil::EmitReport(report, dir);
    PrintSummary(report, dir);
  } catch (const otcil::ExperimentFailure& e) {
    otcil::EmitReport(e.partial(), dir);
    std::fprintf(stderr, "numerical failure at batch %lld: %s\n",
                 static_cast<long long>(e.batch_index()), e.what());
    return kExitNumerical;
  }
  return kExitOk;
}

int Compare(const std::vector<std::string>& paths, int repeats,
            const std::string& out) {
  std::vector<otcil::RunConfig> configs;
  for (const auto& p : paths) configs.push_back(otcil::LoadRunConfig(p));
  const std::string dir = out.empty() ? configs.front().output_dir : out;
  otcil::Comparison comparison;
  try {
    comparison = otcil::CompareStyles(configs, repeats);
  } catch (const otcil::ContractError& e) {
    throw otcil::ConfigError(e.what());
  }
  otcil::EmitComparison(comparison, dir);
  for (const auto& s : comparison.styles) {
    std::printf("%-24s acc=%s cum_regret=%s\n", s.label.c_str(),
                otcil::FormatReal(otcil::Summarize(s.acc).median).c_str(),
                otcil::FormatReal(otcil::Summarize(s.cum_regret).median)
                    .c_str());
  }
  return kExitOk;
}

int BakeSynthetic(const std::string& spec_path, const std::string& out) {
  std::ifstream in(spec_path);
  if (!in) throw otcil::ConfigError("cannot open spec " + spec_path);
  nlohmann::json tree;
  try {
    tree = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw otcil::ConfigError(spec_path + ": " + e.what());
  }
  const otcil::SyntheticSpec spec = otcil::ParseSyntheticSpec(tree);
  const std::filesystem::path dir = out.empty() ? "." : out;
  std::filesystem::create_directories(dir);
  const auto [train, test] = otcil::MakeGaussianClusters(spec);
  otcil::WriteCsvFeatures(train, dir / "train.csv");
  otcil::WriteCsvFeatures(test, dir / "test.csv");
  std::printf("wrote %lld train and %lld test rows to %s\n",
              static_cast<long long>(train.size()),
              static_cast<long long>(test.size()), dir.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online class-incremental learning with edRVFL learners"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("--out", out, "Output directory")->type_name("DIR");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "Run config (JSON)")->required();
  run->add_option("--out", out, "Output directory")->type_name("DIR");

  std::vector<std::string> config_paths;
  int repeats = 1;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare styles over repeated seeds");
  compare->add_option("--configs", config_paths, "Run configs (JSON)")
      ->required();
  compare->add_option("--repeats", repeats, "Seeds per style")
      ->check(CLI::PositiveNumber);
  compare->add_option("--out", out, "Output directory")->type_name("DIR");

  std::string spec_path;
  CLI::App* bake = app.add_subcommand(
      "bake-synthetic", "Write a Gaussian-cluster dataset as CSV");
  bake->add_option("--spec", spec_path, "Synthetic spec (JSON)")->required();
  bake->add_option("--out", out, "Output directory")->type_name("DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return Run(config_path, out);
    if (*compare) return Compare(config_paths, repeats, out);
    if (*bake) return BakeSynthetic(spec_path, out);
  } catch (const otcil::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const otcil::FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitConfig;
  } catch (const otcil::ContractError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const otcil::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}
