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

#include "otcil/learners.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "Eigen/Cholesky"
#include "otcil/errors.h"

namespace otcil {
namespace {

void CheckShapes(const SubLearnerState& s, const Matrix& design,
                 const Matrix& targets, const Matrix& next_design) {
  if (design.cols() != s.dim()) {
    throw ContractError("step: design has " + std::to_string(design.cols()) +
                        " columns, expected " + std::to_string(s.dim()));
  }
  if (targets.cols() != s.classes() || targets.rows() != design.rows()) {
    throw ContractError("step: targets shape does not match the design");
  }
  if (next_design.rows() > 0 && next_design.cols() != s.dim()) {
    throw ContractError("step: look-ahead design width mismatch");
  }
}

void RequireKind(const SubLearnerState& s, RegKind kind, const char* op) {
  if (s.style.kind != kind) {
    throw ContractError(std::string(op) + ": state has style " +
                        std::string(RegKindName(s.style.kind)));
  }
}

// Folds D_t into the pseudo-incomplete inverse Gram. Skipped at t = 1 in
// skip-first-gram mode.
void AccumulateDagger(SubLearnerState& s, const Matrix& design) {
  if (s.style.init_mode == InitMode::kSkipFirstGram && s.t == 1) return;
  s.eta_dagger = WoodburyUpdate(s.eta_dagger, design, 1.0, s.t);
}

// theta <- theta - eta [((1 - k_cur) D^T D + k_next Dn^T Dn) theta - D^T Y]
void UpdateTheta(SubLearnerState& s, const Matrix& design,
                 const Matrix& targets, const Matrix& next_design,
                 double k_current, double k_next) {
  const Matrix design_theta = design * s.theta;
  const Matrix gram_theta = design.transpose() * design_theta;
  Matrix bracket = (1.0 - k_current) * gram_theta;
  if (next_design.rows() > 0) {
    const Matrix next_theta = next_design * s.theta;
    const Matrix next_gram_theta = next_design.transpose() * next_theta;
    bracket += k_next * next_gram_theta;
  }
  const Matrix cross = design.transpose() * targets;
  bracket -= cross;
  const Matrix delta = s.eta.matrix() * bracket;
  s.theta -= delta;
  if (!AllFinite(s.theta)) {
    throw NumericalError("step: non-finite weight update at batch " +
                             std::to_string(s.t),
                         s.t);
  }
  ++s.t;
}

double Clamp(const RegStyle& style, double k) {
  return std::clamp(k, style.k_min, style.k_max);
}

// Projected covariance D eta D^T + sigma I.
Matrix ProjectedCovariance(const Matrix& design, const PsdMatrix& eta,
                           double sigma) {
  Matrix p = design * eta.matrix() * design.transpose();
  p.diagonal().array() += sigma;
  return p;
}

Matrix SpdInverse(const Matrix& a) {
  const Index n = a.rows();
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(Matrix::Identity(n, n));
  Eigen::LDLT<Matrix> ldlt(a);
  return ldlt.solve(Matrix::Identity(n, n));
}

double AdaptiveKRule(SubLearnerState& s, const Matrix& design,
                     const PsdMatrix& eta) {
  const RegStyle& style = s.style;
  double k = 0.0;
  switch (style.fast_k) {
    case FastK::kOff:
      k = ComputeAdaptiveK(design, eta, style.kappa, style.sigma);
      break;
    case FastK::kTraceNoInverse: {
      const Matrix p = ProjectedCovariance(design, eta, 0.0);
      k = style.kappa * p.trace() / static_cast<double>(design.rows());
      break;
    }
    case FastK::kRandomPick: {
      const Matrix inv =
          SpdInverse(ProjectedCovariance(design, eta, style.sigma));
      std::uniform_int_distribution<Index> pick(0, inv.rows() - 1);
      k = style.kappa / inv.diagonal()(pick(s.rng));
      break;
    }
  }
  if (!std::isfinite(k)) {
    throw NumericalError("adaptive k is not finite", s.t);
  }
  return Clamp(style, k);
}

}  // namespace

RegKind ParseRegKind(std::string_view name) {
  if (name == "ridge") return RegKind::kRidge;
  if (name == "kf") return RegKind::kKf;
  if (name == "kf_bayes") return RegKind::kKfBayes;
  throw ContractError("unknown regularization style: " + std::string(name));
}

std::string_view RegKindName(RegKind kind) {
  switch (kind) {
    case RegKind::kRidge: return "ridge";
    case RegKind::kKf: return "kf";
    case RegKind::kKfBayes: return "kf_bayes";
  }
  return "ridge";
}

InitMode ParseInitMode(std::string_view name) {
  if (name == "exact") return InitMode::kExact;
  if (name == "skip_first_gram") return InitMode::kSkipFirstGram;
  throw ContractError("unknown init_mode: " + std::string(name));
}

std::string_view InitModeName(InitMode mode) {
  return mode == InitMode::kExact ? "exact" : "skip_first_gram";
}

KSource ParseKSource(std::string_view name) {
  if (name == "pseudo_incomplete") return KSource::kPseudoIncomplete;
  if (name == "previous_complete") return KSource::kPreviousComplete;
  throw ContractError("unknown k_source: " + std::string(name));
}

std::string_view KSourceName(KSource source) {
  return source == KSource::kPseudoIncomplete ? "pseudo_incomplete"
                                              : "previous_complete";
}

FastK ParseFastK(std::string_view name) {
  if (name == "off") return FastK::kOff;
  if (name == "random_pick") return FastK::kRandomPick;
  if (name == "trace") return FastK::kTraceNoInverse;
  throw ContractError("unknown fast_k: " + std::string(name));
}

std::string_view FastKName(FastK fast) {
  switch (fast) {
    case FastK::kOff: return "off";
    case FastK::kRandomPick: return "random_pick";
    case FastK::kTraceNoInverse: return "trace";
  }
  return "off";
}

void RegStyle::Validate() const {
  if (kind == RegKind::kKf && !(k >= 0.0 && std::isfinite(k))) {
    throw ContractError("kf style requires k >= 0");
  }
  if (kind == RegKind::kKfBayes && !(kappa > 0.0 && sigma > 0.0)) {
    throw ContractError("kf_bayes style requires kappa > 0 and sigma > 0");
  }
  if (!(k_min > 0.0 && k_max >= k_min)) {
    throw ContractError("adaptive k clamp range is invalid");
  }
}

SubLearnerState SubLearnerState::Create(Index dim, Index classes,
                                        double lambda, const RegStyle& style,
                                        uint64_t seed) {
  if (dim < 1 || classes < 1) {
    throw ContractError("SubLearnerState: dimensions must be >= 1");
  }
  if (!(lambda > 0.0)) throw ContractError("SubLearnerState: lambda <= 0");
  style.Validate();
  SubLearnerState s;
  s.theta = Matrix::Zero(dim, classes);
  s.eta_dagger = PsdMatrix::ScaledIdentity(dim, 1.0 / lambda);
  s.eta = s.eta_dagger;
  s.t = 1;
  s.lambda = lambda;
  s.style = style;
  s.rng.seed(seed);
  return s;
}

size_t SubLearnerState::FootprintBytes() const {
  const auto bytes = [](const Matrix& m) {
    return static_cast<size_t>(m.size()) * sizeof(double);
  };
  return bytes(theta) + bytes(eta_dagger.matrix()) + bytes(eta.matrix());
}

void StepRidge(SubLearnerState& state, const Matrix& design,
               const Matrix& targets) {
  RequireKind(state, RegKind::kRidge, "StepRidge");
  const Matrix none(0, state.dim());
  CheckShapes(state, design, targets, none);
  AccumulateDagger(state, design);
  state.eta = state.eta_dagger;
  UpdateTheta(state, design, targets, none, 0.0, 0.0);
}

void StepKf(SubLearnerState& state, const Matrix& design,
            const Matrix& targets, const Matrix& next_design) {
  RequireKind(state, RegKind::kKf, "StepKf");
  CheckShapes(state, design, targets, next_design);
  const double k = state.style.k;
  AccumulateDagger(state, design);
  state.eta = WoodburyUpdate(state.eta_dagger, next_design, k, state.t);
  UpdateTheta(state, design, targets, next_design, k, k);
}

AdaptiveKPair StepKfBayes(SubLearnerState& state, const Matrix& design,
                          const Matrix& targets, const Matrix& next_design,
                          std::optional<AdaptiveKPair> forced) {
  RequireKind(state, RegKind::kKfBayes, "StepKfBayes");
  CheckShapes(state, design, targets, next_design);
  AccumulateDagger(state, design);
  AdaptiveKPair k;
  if (forced) {
    k = *forced;
  } else {
    const PsdMatrix& source = state.style.k_source == KSource::kPseudoIncomplete
                                  ? state.eta_dagger
                                  : state.eta;
    k.current = design.rows() > 0 ? AdaptiveKRule(state, design, source) : 0.0;
    k.next =
        next_design.rows() > 0 ? AdaptiveKRule(state, next_design, source) : 0.0;
  }
  state.eta = WoodburyUpdate(state.eta_dagger, next_design, k.next, state.t);
  UpdateTheta(state, design, targets, next_design, k.current, k.next);
  return k;
}

double ComputeAdaptiveK(const Matrix& design, const PsdMatrix& eta,
                        double kappa, double sigma) {
  if (design.rows() < 1) {
    throw ContractError("ComputeAdaptiveK: design needs at least one row");
  }
  if (design.cols() != eta.dim()) {
    throw ContractError("ComputeAdaptiveK: design width mismatch");
  }
  if (!(kappa > 0.0) || !(sigma >= 0.0)) {
    throw ContractError("ComputeAdaptiveK: need kappa > 0, sigma >= 0");
  }
  const double trace_inv =
      SpdInverse(ProjectedCovariance(design, eta, sigma)).trace();
  const double k = kappa * static_cast<double>(design.rows()) / trace_inv;
  if (!std::isfinite(trace_inv) || !std::isfinite(k)) {
    throw NumericalError("ComputeAdaptiveK: non-finite trace");
  }
  return k;
}

std::optional<AdaptiveKPair> Step(SubLearnerState& state, const Matrix& design,
                                  const Matrix& targets,
                                  const Matrix& next_design) {
  switch (state.style.kind) {
    case RegKind::kRidge:
      StepRidge(state, design, targets);
      return std::nullopt;
    case RegKind::kKf:
      StepKf(state, design, targets, next_design);
      return std::nullopt;
    case RegKind::kKfBayes:
      return StepKfBayes(state, design, targets, next_design);
  }
  return std::nullopt;
}

}  // namespace otcil
