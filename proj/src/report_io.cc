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

#include "otcil/report_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otcil {
namespace {

using nlohmann::json;

// NaN and infinities become null.
json Real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json Reals(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(Real(v));
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create directory: " + dir.string());
  }
}

json BaselineToJson(const BaselineRecord& b) {
  return {{"kind", BaselineKindName(b.kind)},
          {"accuracy", Real(b.accuracy)},
          {"task_accuracy", Reals(b.task_accuracy)}};
}

json SpreadToJson(const std::vector<double>& values) {
  const Spread s = Summarize(values);
  return {{"median", Real(s.median)},
          {"min", Real(s.min)},
          {"max", Real(s.max)},
          {"values", Reals(values)}};
}

}  // namespace

std::string FormatReal(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json ReportToJson(const RunReport& report, bool include_timing) {
  json points = json::array();
  for (const TracePoint& p : report.trace.points()) {
    points.push_back({{"t", p.t},
                      {"acc_seen", Real(p.acc_seen)},
                      {"acc_full", Real(p.acc_full)},
                      {"regret", Real(p.regret)},
                      {"cum_regret", Real(p.cum_regret)},
                      {"kl", Real(p.kl)}});
  }
  json ks = json::array();
  for (const KTraceEntry& k : report.trace.k_trace()) {
    ks.push_back({{"t", k.t},
                  {"layer", k.layer + 1},
                  {"k_t", Real(k.k_current)},
                  {"k_next", Real(k.k_next)}});
  }
  json r = json::array();
  for (int i = 0; i < report.accuracy.tasks(); ++i) {
    json row = json::array();
    for (int j = 0; j < report.accuracy.tasks(); ++j) {
      row.push_back(Real(report.accuracy.r(i, j)));
    }
    r.push_back(row);
  }
  json independent = json::array();
  for (Index i = 0; i < report.accuracy.independent.size(); ++i) {
    independent.push_back(Real(report.accuracy.independent(i)));
  }
  json baselines = json::array();
  for (const auto& b : report.baselines) baselines.push_back(BaselineToJson(b));

  json out = {
      {"completed", report.completed},
      {"failure",
       report.completed
           ? json(nullptr)
           : json{{"message", report.failure},
                  {"batch", report.failed_batch},
                  {"layer", report.failed_layer >= 0
                                ? json(report.failed_layer + 1)
                                : json(nullptr)},
                  {"style", report.config["style"]["kind"]}}},
      {"config", report.config},
      {"seeds",
       {{"weights", report.seeds.weights},
        {"order", report.seeds.order},
        {"synthetic", report.seeds.synthetic}}},
      {"stream",
       {{"batches", report.batches},
        {"tasks", report.tasks},
        {"batch_size", report.batch_size},
        {"hash", report.stream_hash}}},
      {"audit",
       {{"learner_annotation_reads", report.learner_annotation_reads},
        {"state_bytes_initial", report.state_bytes_initial},
        {"state_bytes_final", report.state_bytes_final},
        {"cumulative_regret_nondecreasing",
         report.trace.CumulativeRegretNondecreasing()}}},
      {"metrics",
       {{"acc", Real(report.acc)},
        {"bwt", Real(report.bwt)},
        {"fwt", Real(report.fwt)},
        {"final_acc_full", Real(report.final_acc_full())},
        {"cumulative_regret", Real(report.cumulative_regret())}}},
      {"accuracy_matrix", {{"r", r}, {"independent", independent}}},
      {"trace", points},
      {"k_trace", ks},
      {"baselines", baselines}};
  if (include_timing) out["batch_seconds"] = Reals(report.batch_seconds);
  return out;
}

void EmitReport(const RunReport& report, const std::filesystem::path& dir) {
  EnsureDir(dir);
  WriteFile(dir / "report.json", ReportToJson(report).dump(2) + "\n");

  std::ostringstream curves;
  curves << "t,acc_seen,acc_full,regret,cum_regret,kl\n";
  for (const TracePoint& p : report.trace.points()) {
    curves << p.t << ',' << FormatReal(p.acc_seen) << ','
           << FormatReal(p.acc_full) << ',' << FormatReal(p.regret) << ','
           << FormatReal(p.cum_regret) << ',' << FormatReal(p.kl) << '\n';
  }
  WriteFile(dir / "curves.csv", curves.str());

  std::ostringstream kmatrix;
  kmatrix << "t,layer,k_t,k_next\n";
  for (const KTraceEntry& k : report.trace.k_trace()) {
    kmatrix << k.t << ',' << k.layer + 1 << ',' << FormatReal(k.k_current)
            << ',' << FormatReal(k.k_next) << '\n';
  }
  WriteFile(dir / "kmatrix.csv", kmatrix.str());

  // One row per task, no header; undefined entries are written as nan.
  std::ostringstream acc;
  for (int i = 0; i < report.accuracy.tasks(); ++i) {
    for (int j = 0; j < report.accuracy.tasks(); ++j) {
      if (j) acc << ',';
      acc << FormatReal(report.accuracy.r(i, j));
    }
    acc << '\n';
  }
  WriteFile(dir / "accmatrix.csv", acc.str());
}

nlohmann::json ComparisonToJson(const Comparison& comparison) {
  json styles = json::array();
  for (const StyleSummary& s : comparison.styles) {
    styles.push_back({{"label", s.label},
                      {"kind", RegKindName(s.style.kind)},
                      {"acc", SpreadToJson(s.acc)},
                      {"bwt", SpreadToJson(s.bwt)},
                      {"fwt", SpreadToJson(s.fwt)},
                      {"cum_regret", SpreadToJson(s.cum_regret)},
                      {"final_acc_full", SpreadToJson(s.final_acc_full)},
                      {"offline_acc", SpreadToJson(s.offline_acc)}});
  }
  return {{"repeats", comparison.repeats}, {"styles", styles}};
}

void EmitComparison(const Comparison& comparison,
                    const std::filesystem::path& dir) {
  EnsureDir(dir);
  WriteFile(dir / "comparison.json",
            ComparisonToJson(comparison).dump(2) + "\n");
  std::ostringstream csv;
  csv << "style,metric,median,min,max,runs\n";
  for (const StyleSummary& s : comparison.styles) {
    const std::pair<const char*, const std::vector<double>*> metrics[] = {
        {"acc", &s.acc},
        {"bwt", &s.bwt},
        {"fwt", &s.fwt},
        {"cum_regret", &s.cum_regret},
        {"final_acc_full", &s.final_acc_full}};
    for (const auto& [name, values] : metrics) {
      const Spread sp = Summarize(*values);
      csv << s.label << ',' << name << ',' << FormatReal(sp.median) << ','
          << FormatReal(sp.min) << ',' << FormatReal(sp.max) << ','
          << values->size() << '\n';
    }
  }
  WriteFile(dir / "comparison.csv", csv.str());
}

}  // namespace otcil
