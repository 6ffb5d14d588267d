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

#ifndef OTCIL_LEARNERS_H_
#define OTCIL_LEARNERS_H_

// One-pass recursive updates of a single sub-learner (one edRVFL output
// head). Every step reads only the current labeled batch and the next
// batch's unlabeled design; state size does not depend on how many batches
// have been seen.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "otcil/core_solver.h"

namespace otcil {

enum class RegKind { kRidge, kKf, kKfBayes };

// kExact accumulates D_1^T D_1 into the inverse Gram at the first step, so
// the recursion matches the closed-form minimizer. kSkipFirstGram starts from
// the prior alone and never accumulates the first batch's Gram.
enum class InitMode { kExact, kSkipFirstGram };

// Which inverse Gram the adaptive k is computed from: the pseudo-incomplete
// one freshly updated with D_t, or the complete one from the previous step.
enum class KSource { kPseudoIncomplete, kPreviousComplete };

// Cheap alternatives to the trace-of-inverse rule for adaptive k.
enum class FastK { kOff, kRandomPick, kTraceNoInverse };

RegKind ParseRegKind(std::string_view name);
std::string_view RegKindName(RegKind kind);
InitMode ParseInitMode(std::string_view name);
std::string_view InitModeName(InitMode mode);
KSource ParseKSource(std::string_view name);
std::string_view KSourceName(KSource source);
FastK ParseFastK(std::string_view name);
std::string_view FastKName(FastK fast);

struct RegStyle {
  RegKind kind = RegKind::kRidge;
  double k = 1.0;        // forward weight, kf only
  double kappa = 1.0;    // kf_bayes scale
  double sigma = 1e-5;   // kf_bayes diagonal loading
  InitMode init_mode = InitMode::kExact;
  KSource k_source = KSource::kPseudoIncomplete;
  FastK fast_k = FastK::kOff;
  double k_min = 1e-6;
  double k_max = 1e6;

  void Validate() const;
};

// (k_{l,t}, k_{l,t+1}) as used by one adaptive step.
struct AdaptiveKPair {
  double current = 0.0;
  double next = 0.0;
};

struct SubLearnerState {
  Matrix theta;           // d x m output weights
  PsdMatrix eta_dagger;   // (lambda I + sum of accumulated D_i^T D_i)^{-1}
  PsdMatrix eta;          // eta_dagger with the forward term folded in
  int64_t t = 1;          // index of the next labeled batch
  double lambda = 1.0;
  RegStyle style;
  std::mt19937_64 rng;    // only used by FastK::kRandomPick

  static SubLearnerState Create(Index dim, Index classes, double lambda,
                                const RegStyle& style, uint64_t seed = 0);

  Index dim() const { return theta.rows(); }
  Index classes() const { return theta.cols(); }
  // Bytes held by the matrices; constant over the stream.
  size_t FootprintBytes() const;
};

// Ridge (k = 0) recursion.
void StepRidge(SubLearnerState& state, const Matrix& design,
               const Matrix& targets);

// Constant-k forward recursion. `next_design` may have zero rows at the end
// of the stream, in which case the forward term vanishes.
void StepKf(SubLearnerState& state, const Matrix& design,
            const Matrix& targets, const Matrix& next_design);

// Adaptive-k forward recursion. `forced` bypasses the k rule (and clamping)
// with fixed values. Returns the k pair that was applied.
AdaptiveKPair StepKfBayes(SubLearnerState& state, const Matrix& design,
                          const Matrix& targets, const Matrix& next_design,
                          std::optional<AdaptiveKPair> forced = std::nullopt);

// kappa * b / Tr[(D eta D^T + sigma I)^{-1}], unclamped.
double ComputeAdaptiveK(const Matrix& design, const PsdMatrix& eta,
                        double kappa, double sigma);

// Dispatches on state.style.kind. Returns the adaptive pair for kf_bayes.
std::optional<AdaptiveKPair> Step(SubLearnerState& state, const Matrix& design,
                                  const Matrix& targets,
                                  const Matrix& next_design);

}  // namespace otcil

#endif  // OTCIL_LEARNERS_H_
