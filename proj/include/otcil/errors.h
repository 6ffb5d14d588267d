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

#ifndef OTCIL_ERRORS_H_
#define OTCIL_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace otcil {

// A caller violated a documented precondition (shapes, ranges, missing data).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced non-finite values or a factorization failed.
// Carries the stream position when known (-1 otherwise).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int64_t batch_index = -1,
                          int layer_index = -1)
      : std::runtime_error(what),
        batch_index_(batch_index),
        layer_index_(layer_index) {}

  int64_t batch_index() const { return batch_index_; }
  int layer_index() const { return layer_index_; }

 private:
  int64_t batch_index_;
  int layer_index_;
};

// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace otcil

#endif  // OTCIL_ERRORS_H_
