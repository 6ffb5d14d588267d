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

#ifndef OTCIL_CORE_SOLVER_H_
#define OTCIL_CORE_SOLVER_H_

// Primitives of the recursive least-squares machinery: rank-b Woodbury
// updates of an inverse Gram matrix, quadratic Bregman divergences, and the
// closed-form offline solvers used as oracles for the streaming learners.

#include <cstdint>
#include <span>

#include "Eigen/Core"

namespace otcil {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Symmetric positive definite matrix. Construction symmetrizes the input, so
// the stored value is exactly symmetric.
class PsdMatrix {
 public:
  PsdMatrix() = default;
  // Throws ContractError when `m` is not square or has non-finite entries.
  explicit PsdMatrix(Matrix m);

  static PsdMatrix ScaledIdentity(Index dim, double scale);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

  // Cholesky success is used as the positive-definiteness spot check.
  bool IsCholeskyDecomposable() const;
  Matrix Inverse() const;

 private:
  Matrix m_;
};

// Returns (eta^{-1} + c * D^T D)^{-1}, computed through the b x b system
// (I + c D eta D^T). A design with zero rows, or c == 0, returns eta as is.
// `batch_index` only labels a NumericalError.
PsdMatrix WoodburyUpdate(const PsdMatrix& eta, const Matrix& design, double c,
                         int64_t batch_index = -1);

// sum_i 1/2 (a_i - b_i)^T M (a_i - b_i) over the columns of a and b.
double BregmanQuadratic(const Matrix& theta_a, const Matrix& theta_b,
                        const PsdMatrix& metric);

struct OfflineSolution {
  Matrix theta;
  PsdMatrix gram;  // lambda I + accumulated (weighted) design Gram
  Matrix cross;    // accumulated D_i^T Y_i
};

// Primal ridge solution (D^T D + lambda I)^{-1} D^T Y.
OfflineSolution OfflineRidgeFit(const Matrix& design, const Matrix& targets,
                                double lambda);

// Dual form D^T (D D^T + lambda I)^{-1} Y. Only used to cross-check the
// primal solver.
Matrix OfflineRidgeFitDual(const Matrix& design, const Matrix& targets,
                           double lambda);

// Minimizer of the forward-regularized offline objective after t labeled
// batches and one unlabeled look-ahead batch:
//   (lambda I + sum_i D_i^T D_i + k D_next^T D_next)^{-1} sum_i D_i^T Y_i.
// `next_design` may have zero rows (no look-ahead available).
OfflineSolution OfflineKfFit(std::span<const Matrix> designs,
                             std::span<const Matrix> targets,
                             const Matrix& next_design, double k,
                             double lambda);

bool AllFinite(const Matrix& m);

}  // namespace otcil

#endif  // OTCIL_CORE_SOLVER_H_
