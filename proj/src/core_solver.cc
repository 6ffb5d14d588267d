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

#include "otcil/core_solver.h"

#include <algorithm>
#include <string>

#include "Eigen/Cholesky"
#include "otcil/errors.h"

namespace otcil {
namespace {

void Symmetrize(Matrix& m) {
  // (m + m^T) / 2 written elementwise so the result is exactly symmetric.
  const Index n = m.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
}

// Solves the SPD system a x = rhs. Cholesky first, LDL^T as fallback.
bool SolveSpd(const Matrix& a, const Matrix& rhs, Matrix& x) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    x = llt.solve(rhs);
    if (AllFinite(x)) return true;
  }
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) return false;
  x = ldlt.solve(rhs);
  return AllFinite(x);
}

void RequireFinite(const Matrix& m, const char* what) {
  if (!AllFinite(m)) {
    throw ContractError(std::string(what) + " has non-finite entries");
  }
}

}  // namespace

bool AllFinite(const Matrix& m) { return m.allFinite(); }

PsdMatrix::PsdMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ContractError("PsdMatrix: matrix is not square");
  }
  RequireFinite(m_, "PsdMatrix");
  Symmetrize(m_);
}

PsdMatrix PsdMatrix::ScaledIdentity(Index dim, double scale) {
  return PsdMatrix(Matrix::Identity(dim, dim) * scale);
}

bool PsdMatrix::IsCholeskyDecomposable() const {
  Eigen::LLT<Matrix> llt(m_);
  return llt.info() == Eigen::Success;
}

Matrix PsdMatrix::Inverse() const {
  Matrix inv;
  if (!SolveSpd(m_, Matrix::Identity(dim(), dim()), inv)) {
    throw NumericalError("PsdMatrix: inverse failed");
  }
  return inv;
}

PsdMatrix WoodburyUpdate(const PsdMatrix& eta, const Matrix& design, double c,
                         int64_t batch_index) {
  if (design.cols() != eta.dim()) {
    throw ContractError("WoodburyUpdate: design has " +
                        std::to_string(design.cols()) + " columns, expected " +
                        std::to_string(eta.dim()));
  }
  if (!(c >= 0.0)) {
    throw ContractError("WoodburyUpdate: weight must be nonnegative");
  }
  if (design.rows() == 0 || c == 0.0) return eta;

  const Index b = design.rows();
  const Matrix eta_dt = eta.matrix() * design.transpose();  // d x b
  Matrix inner = Matrix::Identity(b, b);
  inner.noalias() += c * (design * eta_dt);
  Matrix x;  // inner^{-1} (eta D^T)^T
  if (!AllFinite(inner) || !SolveSpd(inner, eta_dt.transpose(), x)) {
    throw NumericalError("WoodburyUpdate: inner system is not solvable",
                         batch_index);
  }
  Matrix updated = eta.matrix();
  updated.noalias() -= c * (eta_dt * x);
  if (!AllFinite(updated)) {
    throw NumericalError("WoodburyUpdate: non-finite result", batch_index);
  }
  return PsdMatrix(std::move(updated));
}

double BregmanQuadratic(const Matrix& theta_a, const Matrix& theta_b,
                        const PsdMatrix& metric) {
  if (theta_a.rows() != theta_b.rows() || theta_a.cols() != theta_b.cols()) {
    throw ContractError("BregmanQuadratic: argument shapes differ");
  }
  if (theta_a.rows() != metric.dim()) {
    throw ContractError("BregmanQuadratic: metric dimension mismatch");
  }
  const Matrix diff = theta_a - theta_b;
  const double value = 0.5 * (diff.cwiseProduct(metric.matrix() * diff)).sum();
  return std::max(0.0, value);
}

OfflineSolution OfflineRidgeFit(const Matrix& design, const Matrix& targets,
                                double lambda) {
  if (!(lambda > 0.0)) throw ContractError("OfflineRidgeFit: lambda <= 0");
  if (design.rows() < 1) throw ContractError("OfflineRidgeFit: no samples");
  if (design.rows() != targets.rows()) {
    throw ContractError("OfflineRidgeFit: row count mismatch");
  }
  RequireFinite(design, "OfflineRidgeFit design");
  RequireFinite(targets, "OfflineRidgeFit targets");

  const Index d = design.cols();
  Matrix gram = Matrix::Identity(d, d) * lambda;
  gram.noalias() += design.transpose() * design;
  Matrix cross = design.transpose() * targets;
  Matrix theta;
  if (!SolveSpd(gram, cross, theta)) {
    throw NumericalError("OfflineRidgeFit: normal equations not solvable");
  }
  return {std::move(theta), PsdMatrix(std::move(gram)), std::move(cross)};
}

Matrix OfflineRidgeFitDual(const Matrix& design, const Matrix& targets,
                           double lambda) {
  if (!(lambda > 0.0)) throw ContractError("OfflineRidgeFitDual: lambda <= 0");
  if (design.rows() != targets.rows()) {
    throw ContractError("OfflineRidgeFitDual: row count mismatch");
  }
  RequireFinite(design, "OfflineRidgeFitDual design");
  RequireFinite(targets, "OfflineRidgeFitDual targets");
  const Index n = design.rows();
  Matrix kernel = Matrix::Identity(n, n) * lambda;
  kernel.noalias() += design * design.transpose();
  Matrix alpha;
  if (!SolveSpd(kernel, targets, alpha)) {
    throw NumericalError("OfflineRidgeFitDual: kernel system not solvable");
  }
  return design.transpose() * alpha;
}

OfflineSolution OfflineKfFit(std::span<const Matrix> designs,
                             std::span<const Matrix> targets,
                             const Matrix& next_design, double k,
                             double lambda) {
  if (designs.empty()) throw ContractError("OfflineKfFit: need t >= 1");
  if (designs.size() != targets.size()) {
    throw ContractError("OfflineKfFit: designs/targets length mismatch");
  }
  if (!(lambda > 0.0)) throw ContractError("OfflineKfFit: lambda <= 0");
  if (!(k >= 0.0)) throw ContractError("OfflineKfFit: k < 0");
  const Index d = designs.front().cols();
  const Index m = targets.front().cols();
  Matrix gram = Matrix::Identity(d, d) * lambda;
  Matrix cross = Matrix::Zero(d, m);
  for (size_t i = 0; i < designs.size(); ++i) {
    if (designs[i].cols() != d || targets[i].cols() != m ||
        designs[i].rows() != targets[i].rows()) {
      throw ContractError("OfflineKfFit: inconsistent batch shapes");
    }
    gram.noalias() += designs[i].transpose() * designs[i];
    cross.noalias() += designs[i].transpose() * targets[i];
  }
  if (next_design.rows() > 0) {
    if (next_design.cols() != d) {
      throw ContractError("OfflineKfFit: look-ahead design width mismatch");
    }
    gram.noalias() += k * (next_design.transpose() * next_design);
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("OfflineKfFit: Cholesky factorization failed");
  }
  Matrix theta = llt.solve(cross);
  return {std::move(theta), PsdMatrix(std::move(gram)), std::move(cross)};
}

}  // namespace otcil
