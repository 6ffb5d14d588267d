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

#ifndef OTCIL_PARALLEL_H_
#define OTCIL_PARALLEL_H_

#include <exception>
#include <vector>

namespace otcil {

// Selects between the OpenMP kernels and their serial reference. Both paths
// perform the same per-item arithmetic, so results are bitwise identical.
enum class Execution { kSerial, kParallel };

// Runs fn(i) for i in [0, count). Exceptions thrown inside the OpenMP region
// are captured per item and the first one (lowest index) is rethrown.
template <typename Fn>
void ForEachIndex(int count, Execution execution, Fn&& fn) {
  if (execution == Execution::kSerial || count < 2) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace otcil

#endif  // OTCIL_PARALLEL_H_
