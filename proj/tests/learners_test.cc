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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "otcil/errors.h"
#include "test_util.h"

namespace otcil {
namespace {

using ::otcil::testing::Gram;
using ::otcil::testing::MakeRandomStream;
using ::otcil::testing::MaxAbs;
using ::otcil::testing::QrSolve;
using ::otcil::testing::RandomMatrix;
using ::otcil::testing::RandomOneHot;
using ::otcil::testing::RandomStream;
using ::otcil::testing::ReferenceKfTheta;
using ::otcil::testing::RelErr;

RegStyle Style(RegKind kind, double k = 1.0,
               InitMode mode = InitMode::kExact) {
  RegStyle s;
  s.kind = kind;
  s.k = k;
  s.init_mode = mode;
  return s;
}

Matrix Scalar(double v) { return Matrix::Constant(1, 1, v); }

TEST(RegStyleTest, Validation) {
  EXPECT_THROW(Style(RegKind::kKf, -0.5).Validate(), ContractError);
  RegStyle s = Style(RegKind::kKfBayes);
  s.kappa = 0.0;
  EXPECT_THROW(s.Validate(), ContractError);
  s = Style(RegKind::kKfBayes);
  s.sigma = 0.0;
  EXPECT_THROW(s.Validate(), ContractError);
  EXPECT_NO_THROW(Style(RegKind::kKfBayes).Validate());
}

TEST(RegStyleTest, NamesRoundTrip) {
  for (RegKind k : {RegKind::kRidge, RegKind::kKf, RegKind::kKfBayes}) {
    EXPECT_EQ(ParseRegKind(RegKindName(k)), k);
  }
  for (FastK f : {FastK::kOff, FastK::kRandomPick, FastK::kTraceNoInverse}) {
    EXPECT_EQ(ParseFastK(FastKName(f)), f);
  }
  EXPECT_EQ(ParseInitMode("skip_first_gram"), InitMode::kSkipFirstGram);
  EXPECT_EQ(ParseKSource("previous_complete"), KSource::kPreviousComplete);
  EXPECT_THROW(ParseRegKind("lasso"), ContractError);
}

TEST(SubLearnerStateTest, InitialState) {
  const auto s = SubLearnerState::Create(4, 3, 2.0, Style(RegKind::kRidge));
  EXPECT_EQ(MaxAbs(s.theta), 0.0);
  EXPECT_EQ(s.eta_dagger.matrix(), Matrix::Identity(4, 4) * 0.5);
  EXPECT_EQ(s.t, 1);
  EXPECT_THROW(SubLearnerState::Create(4, 3, 0.0, Style(RegKind::kRidge)),
               ContractError);
}

TEST(StepRidgeTest, ZeroStreamStaysZero) {
  std::mt19937_64 rng(1);
  auto s = SubLearnerState::Create(5, 3, 1.0, Style(RegKind::kRidge));
  for (int t = 0; t < 5; ++t) {
    StepRidge(s, RandomMatrix(4, 5, rng), Matrix::Zero(4, 3));
  }
  EXPECT_EQ(MaxAbs(s.theta), 0.0);
  EXPECT_EQ(s.t, 6);
}

TEST(StepRidgeTest, HandCase) {
  auto s = SubLearnerState::Create(1, 1, 1.0, Style(RegKind::kRidge));
  StepRidge(s, Scalar(1.0), Scalar(1.0));
  EXPECT_DOUBLE_EQ(s.theta(0, 0), 0.5);
}

TEST(StepRidgeTest, MatchesOfflineRidgeAtEveryStep) {
  std::mt19937_64 rng(2);
  const RandomStream st = MakeRandomStream(10, 4, 7, 3, rng);
  auto s = SubLearnerState::Create(7, 3, 0.8, Style(RegKind::kRidge));
  const Matrix none(0, 7);
  for (int t = 0; t < 10; ++t) {
    StepRidge(s, st.designs[t], st.targets[t]);
    const std::vector<Matrix> d(st.designs.begin(), st.designs.begin() + t + 1);
    const std::vector<Matrix> y(st.targets.begin(), st.targets.begin() + t + 1);
    EXPECT_LT(RelErr(s.theta, ReferenceKfTheta(d, y, none, 0.0, 0.8)), 1e-9)
        << "t=" << t + 1;
  }
}

TEST(StepRidgeTest, SkipFirstGramSkipsFirstGram) {
  std::mt19937_64 rng(3);
  const Matrix d = RandomMatrix(3, 4, rng);
  const Matrix y = RandomOneHot(3, 2, rng);
  auto s = SubLearnerState::Create(4, 2, 2.0,
                                   Style(RegKind::kRidge, 0.0,
                                         InitMode::kSkipFirstGram));
  StepRidge(s, d, y);
  EXPECT_EQ(s.eta_dagger.matrix(), Matrix::Identity(4, 4) * 0.5);
  EXPECT_LT(RelErr(s.theta, d.transpose() * y / 2.0), 1e-15);
}

TEST(StepRidgeTest, ContractErrors) {
  auto s = SubLearnerState::Create(3, 2, 1.0, Style(RegKind::kRidge));
  EXPECT_THROW(StepRidge(s, Matrix::Zero(2, 4), Matrix::Zero(2, 2)),
               ContractError);
  EXPECT_THROW(StepRidge(s, Matrix::Zero(2, 3), Matrix::Zero(3, 2)),
               ContractError);
  EXPECT_THROW(StepKf(s, Matrix::Zero(2, 3), Matrix::Zero(2, 2),
                      Matrix::Zero(2, 3)),
               ContractError);
}

TEST(StepRidgeTest, OverflowReportsBatch) {
  auto s = SubLearnerState::Create(2, 1, 1.0, Style(RegKind::kRidge));
  StepRidge(s, Matrix::Ones(2, 2), Matrix::Ones(2, 1));
  try {
    StepRidge(s, Matrix::Ones(2, 2), Matrix::Constant(2, 1, 1e308));
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.batch_index(), 2);
  }
}

TEST(StepKfTest, ZeroWeightIsRidge) {
  std::mt19937_64 rng(4);
  for (int c = 0; c < 50; ++c) {
    const RandomStream st = MakeRandomStream(3, 4, 6, 3, rng);
    auto kf = SubLearnerState::Create(6, 3, 1.3, Style(RegKind::kKf, 0.0));
    auto ridge = SubLearnerState::Create(6, 3, 1.3, Style(RegKind::kRidge));
    for (int t = 0; t < 3; ++t) {
      StepKf(kf, st.designs[t], st.targets[t], st.designs[t + 1]);
      StepRidge(ridge, st.designs[t], st.targets[t]);
    }
    EXPECT_LE(MaxAbs(kf.theta - ridge.theta), 1e-12);
  }
}

TEST(StepKfTest, HandCase) {
  auto s = SubLearnerState::Create(1, 1, 1.0, Style(RegKind::kKf, 1.0));
  StepKf(s, Scalar(1.0), Scalar(1.0), Scalar(2.0));
  EXPECT_NEAR(s.eta.matrix()(0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.theta(0, 0), 1.0 / 6.0, 1e-15);
}

TEST(StepKfTest, UnitWeightRealizesForwardUpdate) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 50; ++c) {
    const RandomStream st = MakeRandomStream(4, 3, 5, 2, rng);
    auto s = SubLearnerState::Create(5, 2, 0.9, Style(RegKind::kKf, 1.0));
    for (int t = 0; t < 4; ++t) {
      const Matrix before = s.theta;
      const Matrix& d = st.designs[t];
      const Matrix& dn = st.designs[t + 1];
      StepKf(s, d, st.targets[t], dn);
      // theta - eta [Dn^T Dn theta - D^T Y]
      const Matrix next_theta = dn * before;
      Matrix bracket = dn.transpose() * next_theta;
      const Matrix cross = d.transpose() * st.targets[t];
      bracket -= cross;
      const Matrix delta = s.eta.matrix() * bracket;
      Matrix expected = before;
      expected -= delta;
      EXPECT_EQ(s.theta, expected) << "case " << c << " t=" << t + 1;
    }
  }
}

TEST(StepKfTest, NoDissipationAgainstAssembledSystem) {
  for (double k : {0.5, 1.0, 2.0}) {
    std::mt19937_64 rng(6);
    const RandomStream st = MakeRandomStream(30, 5, 12, 4, rng);
    auto s = SubLearnerState::Create(12, 4, 1.0, Style(RegKind::kKf, k));
    Matrix precision = Matrix::Identity(12, 12);
    for (int t = 0; t < 30; ++t) {
      StepKf(s, st.designs[t], st.targets[t], st.designs[t + 1]);
      const std::vector<Matrix> d(st.designs.begin(),
                                  st.designs.begin() + t + 1);
      const std::vector<Matrix> y(st.targets.begin(),
                                  st.targets.begin() + t + 1);
      EXPECT_LT(RelErr(s.theta,
                       ReferenceKfTheta(d, y, st.designs[t + 1], k, 1.0)),
                1e-8)
          << "k=" << k << " t=" << t + 1;
      precision += Gram(st.designs[t]);
      const Matrix expected_inv = precision + k * Gram(st.designs[t + 1]);
      EXPECT_LT(RelErr(s.eta.matrix().inverse(), expected_inv), 1e-7);
    }
  }
}

TEST(StepKfTest, EmptyLookAheadEndsOnOfflineRidge) {
  std::mt19937_64 rng(7);
  const RandomStream st = MakeRandomStream(6, 4, 6, 3, rng);
  auto s = SubLearnerState::Create(6, 3, 1.0, Style(RegKind::kKf, 1.5));
  for (int t = 0; t < 6; ++t) {
    const Matrix next = t + 1 < 6 ? st.designs[t + 1] : Matrix(0, 6);
    StepKf(s, st.designs[t], st.targets[t], next);
  }
  const std::vector<Matrix> d(st.designs.begin(), st.designs.begin() + 6);
  EXPECT_LT(RelErr(s.theta,
                   ReferenceKfTheta(d, st.targets, Matrix(0, 6), 0.0, 1.0)),
            1e-9);
}

TEST(AdaptiveKTest, IdentityProjectionGivesKappa) {
  const Matrix d = Matrix::Identity(3, 5);
  const PsdMatrix eta = PsdMatrix::ScaledIdentity(5, 1.0);
  EXPECT_EQ(ComputeAdaptiveK(d, eta, 1.0, 0.0), 1.0);
  EXPECT_EQ(ComputeAdaptiveK(d, eta, 2.5, 0.0), 2.5);
}

TEST(AdaptiveKTest, LinearInKappa) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 20; ++c) {
    const Matrix d = RandomMatrix(4, 6, rng);
    const PsdMatrix eta(::otcil::testing::RandomSpd(6, rng));
    const double k1 = ComputeAdaptiveK(d, eta, 1.0, 1e-5);
    const double k2 = ComputeAdaptiveK(d, eta, 2.0, 1e-5);
    EXPECT_GT(k1, 0.0);
    EXPECT_NEAR(k2, 2.0 * k1, 1e-12 * k2);
  }
}

TEST(AdaptiveKTest, DiagonalHandCase) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = std::sqrt(3.0);
  const double k =
      ComputeAdaptiveK(d, PsdMatrix::ScaledIdentity(2, 1.0), 1.0, 0.0);
  EXPECT_NEAR(k, 1.5, 1e-14);
}

TEST(AdaptiveKTest, Contracts) {
  const PsdMatrix eta = PsdMatrix::ScaledIdentity(3, 1.0);
  EXPECT_THROW(ComputeAdaptiveK(Matrix(0, 3), eta, 1.0, 1e-5), ContractError);
  EXPECT_THROW(ComputeAdaptiveK(Matrix::Ones(1, 2), eta, 1.0, 1e-5),
               ContractError);
  EXPECT_THROW(ComputeAdaptiveK(Matrix::Ones(1, 3), eta, 0.0, 1e-5),
               ContractError);
}

TEST(StepKfBayesTest, ForcedZeroIsRidge) {
  std::mt19937_64 rng(9);
  for (int c = 0; c < 20; ++c) {
    const RandomStream st = MakeRandomStream(4, 3, 5, 3, rng);
    auto bayes = SubLearnerState::Create(5, 3, 1.0, Style(RegKind::kKfBayes));
    auto ridge = SubLearnerState::Create(5, 3, 1.0, Style(RegKind::kRidge));
    for (int t = 0; t < 4; ++t) {
      StepKfBayes(bayes, st.designs[t], st.targets[t], st.designs[t + 1],
                  AdaptiveKPair{0.0, 0.0});
      StepRidge(ridge, st.designs[t], st.targets[t]);
    }
    EXPECT_LE(MaxAbs(bayes.theta - ridge.theta), 1e-12);
  }
}

TEST(StepKfBayesTest, ForcedConstantIsKf) {
  std::mt19937_64 rng(10);
  for (double k : {0.3, 1.0, 2.2}) {
    const RandomStream st = MakeRandomStream(6, 4, 6, 3, rng);
    auto bayes = SubLearnerState::Create(6, 3, 0.7, Style(RegKind::kKfBayes));
    auto kf = SubLearnerState::Create(6, 3, 0.7, Style(RegKind::kKf, k));
    for (int t = 0; t < 6; ++t) {
      StepKfBayes(bayes, st.designs[t], st.targets[t], st.designs[t + 1],
                  AdaptiveKPair{k, k});
      StepKf(kf, st.designs[t], st.targets[t], st.designs[t + 1]);
      EXPECT_LT(RelErr(bayes.theta, kf.theta), 1e-10);
      EXPECT_LT(RelErr(bayes.eta.matrix(), kf.eta.matrix()), 1e-10);
    }
  }
}

// theta_{t+1} solves
//   (A_t + k_next G_{t+1}) theta = (A_t - (1 - k_cur) G_t) theta_t + D_t^T Y_t
// where A_t = lambda I + the Grams accumulated so far. The right-hand
// precision is the prior re-weighted with this step's k_cur.
TEST(StepKfBayesTest, RecordedTrajectoryMatchesAssembledSystem) {
  for (InitMode mode : {InitMode::kExact, InitMode::kSkipFirstGram}) {
    std::mt19937_64 rng(11);
    const RandomStream st = MakeRandomStream(20, 5, 8, 3, rng);
    const double lambda = 0.5;
    auto s = SubLearnerState::Create(
        8, 3, lambda, Style(RegKind::kKfBayes, 1.0, mode));
    Matrix accumulated = lambda * Matrix::Identity(8, 8);
    for (int t = 0; t < 20; ++t) {
      const Matrix before = s.theta;
      const AdaptiveKPair k =
          StepKfBayes(s, st.designs[t], st.targets[t], st.designs[t + 1]);
      EXPECT_TRUE(std::isfinite(k.current) && k.current > 0.0);
      EXPECT_TRUE(std::isfinite(k.next) && k.next > 0.0);
      if (!(mode == InitMode::kSkipFirstGram && t == 0)) {
        accumulated += Gram(st.designs[t]);
      }
      const Matrix lhs = accumulated + k.next * Gram(st.designs[t + 1]);
      const Matrix prior = accumulated - (1.0 - k.current) * Gram(st.designs[t]);
      const Matrix rhs =
          prior * before + st.designs[t].transpose() * st.targets[t];
      EXPECT_LT(RelErr(s.theta, QrSolve(lhs, rhs)), 1e-8) << "t=" << t + 1;
    }
  }
}

TEST(StepKfBayesTest, KValuesUseSelectedSource) {
  std::mt19937_64 rng(12);
  const RandomStream st = MakeRandomStream(3, 4, 6, 2, rng);
  RegStyle style = Style(RegKind::kKfBayes);
  auto a = SubLearnerState::Create(6, 2, 1.0, style);
  StepKfBayes(a, st.designs[0], st.targets[0], st.designs[1]);
  const PsdMatrix dagger = a.eta_dagger;
  const PsdMatrix complete = a.eta;
  auto pseudo = a;
  auto prev = a;
  prev.style.k_source = KSource::kPreviousComplete;
  const auto kp = StepKfBayes(pseudo, st.designs[1], st.targets[1],
                              st.designs[2]);
  const auto kc = StepKfBayes(prev, st.designs[1], st.targets[1],
                              st.designs[2]);
  const PsdMatrix fresh = WoodburyUpdate(dagger, st.designs[1], 1.0);
  EXPECT_NEAR(kp.current,
              ComputeAdaptiveK(st.designs[1], fresh, 1.0, 1e-5),
              1e-12 * kp.current);
  EXPECT_NEAR(kc.current,
              ComputeAdaptiveK(st.designs[1], complete, 1.0, 1e-5),
              1e-12 * kc.current);
  EXPECT_NE(kp.current, kc.current);
}

TEST(StepKfBayesTest, FastVariants) {
  std::mt19937_64 rng(13);
  const RandomStream st = MakeRandomStream(1, 4, 6, 2, rng);
  RegStyle style = Style(RegKind::kKfBayes);
  style.kappa = 1.5;
  style.fast_k = FastK::kTraceNoInverse;
  auto tr = SubLearnerState::Create(6, 2, 1.0, style, 3);
  const auto k_tr = StepKfBayes(tr, st.designs[0], st.targets[0],
                                st.designs[1]);
  const Matrix& dagger = tr.eta_dagger.matrix();
  const Matrix& dn = st.designs[1];
  EXPECT_NEAR(k_tr.next, 1.5 * (dn * dagger * dn.transpose()).trace() / 4.0,
              1e-12 * k_tr.next);

  style.fast_k = FastK::kRandomPick;
  auto rp1 = SubLearnerState::Create(6, 2, 1.0, style, 3);
  auto rp2 = SubLearnerState::Create(6, 2, 1.0, style, 3);
  const auto k1 = StepKfBayes(rp1, st.designs[0], st.targets[0], dn);
  const auto k2 = StepKfBayes(rp2, st.designs[0], st.targets[0], dn);
  EXPECT_EQ(k1.next, k2.next);
  Matrix proj = dn * rp1.eta_dagger.matrix() * dn.transpose();
  proj.diagonal().array() += 1e-5;
  const Vector inv_diag = proj.inverse().diagonal();
  bool found = false;
  for (Index i = 0; i < inv_diag.size(); ++i) {
    found |= std::abs(k1.next - 1.5 / inv_diag(i)) <= 1e-9 * k1.next;
  }
  EXPECT_TRUE(found);
}

TEST(StepKfBayesTest, ComputedValuesAreClamped) {
  std::mt19937_64 rng(14);
  RegStyle style = Style(RegKind::kKfBayes);
  style.k_max = 0.25;
  auto s = SubLearnerState::Create(4, 2, 1e-3, style);
  const auto k = StepKfBayes(s, RandomMatrix(3, 4, rng, 10.0),
                             RandomOneHot(3, 2, rng),
                             RandomMatrix(3, 4, rng, 10.0));
  EXPECT_EQ(k.next, 0.25);
}

TEST(StepKfBayesTest, EmptyLookAheadGivesZeroNext) {
  std::mt19937_64 rng(15);
  auto s = SubLearnerState::Create(4, 2, 1.0, Style(RegKind::kKfBayes));
  const auto k = StepKfBayes(s, RandomMatrix(3, 4, rng),
                             RandomOneHot(3, 2, rng), Matrix(0, 4));
  EXPECT_EQ(k.next, 0.0);
  EXPECT_GT(k.current, 0.0);
}

class AllStylesTest : public ::testing::TestWithParam<RegKind> {};

TEST_P(AllStylesTest, UnseenClassColumnsStayExactlyZero) {
  std::mt19937_64 rng(16);
  auto s = SubLearnerState::Create(6, 4, 1.0, Style(GetParam(), 1.2));
  Matrix next = RandomMatrix(5, 6, rng);
  for (int t = 0; t < 10; ++t) {
    Matrix y = Matrix::Zero(5, 4);
    for (Index i = 0; i < 5; ++i) y(i, i % 2) = 1.0;
    const Matrix d = next;
    next = RandomMatrix(5, 6, rng);
    Step(s, d, y, next);
  }
  EXPECT_EQ(MaxAbs(s.theta.rightCols(2)), 0.0);
  EXPECT_GT(MaxAbs(s.theta.leftCols(2)), 0.0);
}

TEST_P(AllStylesTest, FootprintIsConstant) {
  std::mt19937_64 rng(17);
  auto s = SubLearnerState::Create(8, 3, 1.0, Style(GetParam(), 0.7));
  const size_t initial = s.FootprintBytes();
  for (int t = 0; t < 50; ++t) {
    Step(s, RandomMatrix(4, 8, rng), RandomOneHot(4, 3, rng),
         RandomMatrix(4, 8, rng));
    EXPECT_EQ(s.FootprintBytes(), initial);
  }
}

TEST_P(AllStylesTest, TelescopingIdentity) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const RandomStream st = MakeRandomStream(12, 4, 7, 3, rng);
    auto s = SubLearnerState::Create(7, 3, 1.0, Style(GetParam(), 0.8));
    Matrix accumulated = Matrix::Identity(7, 7);
    for (int t = 0; t < 12; ++t) {
      const Matrix before = s.theta;
      const auto k = Step(s, st.designs[t], st.targets[t], st.designs[t + 1]);
      const double k_cur = k ? k->current : (GetParam() == RegKind::kKf ? 0.8 : 0.0);
      const double k_next = k ? k->next : (GetParam() == RegKind::kKf ? 0.8 : 0.0);
      accumulated += Gram(st.designs[t]);
      const Matrix after_precision = accumulated + k_next * Gram(st.designs[t + 1]);
      const Matrix prior = accumulated - (1.0 - k_cur) * Gram(st.designs[t]);
      const Matrix cross = st.designs[t].transpose() * st.targets[t];
      const Matrix lhs = after_precision * s.theta - prior * before;
      EXPECT_LT(RelErr(lhs, cross), 1e-8);
      EXPECT_LT(RelErr(s.eta.matrix().inverse(), after_precision), 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Styles, AllStylesTest,
                         ::testing::Values(RegKind::kRidge, RegKind::kKf,
                                           RegKind::kKfBayes),
                         [](const auto& info) {
                           return std::string(RegKindName(info.param));
                         });

}  // namespace
}  // namespace otcil
