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

#ifndef OTCIL_REPORT_IO_H_
#define OTCIL_REPORT_IO_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "otcil/experiment.h"

namespace otcil {

// Doubles as text with 17 significant digits.
std::string FormatReal(double v);

// `include_timing` = false drops the wall-clock fields, leaving a payload
// that is fully determined by the config and seeds.
nlohmann::json ReportToJson(const RunReport& report, bool include_timing = true);

// Writes report.json, curves.csv, kmatrix.csv and accmatrix.csv into `dir`,
// creating it if needed. I/O failures throw std::runtime_error naming the
// path.
void EmitReport(const RunReport& report, const std::filesystem::path& dir);

nlohmann::json ComparisonToJson(const Comparison& comparison);
// Writes comparison.json and comparison.csv.
void EmitComparison(const Comparison& comparison,
                    const std::filesystem::path& dir);

}  // namespace otcil

#endif  // OTCIL_REPORT_IO_H_
