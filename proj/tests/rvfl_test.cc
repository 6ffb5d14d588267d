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

#include "otcil/rvfl.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "otcil/errors.h"
#include "test_util.h"

namespace otcil {
namespace {

using ::otcil::testing::MaxAbs;
using ::otcil::testing::RandomMatrix;

NetworkConfig Net(int layers, int nodes, int input_dim, uint64_t seed = 0) {
  NetworkConfig c;
  c.layers = layers;
  c.nodes = nodes;
  c.input_dim = input_dim;
  c.classes = 3;
  c.seed = seed;
  return c;
}

TEST(NetworkConfigTest, Validation) {
  EXPECT_NO_THROW(Net(2, 3, 4).Validate());
  NetworkConfig c = Net(2, 3, 4);
  c.layers = 0;
  EXPECT_THROW(c.Validate(), ContractError);
  c = Net(2, 3, 4);
  c.lambdas = {1.0, 2.0, 3.0};
  EXPECT_THROW(c.Validate(), ContractError);
  c.lambdas = {1.0, -2.0};
  EXPECT_THROW(c.Validate(), ContractError);
  c.lambdas = {0.5, 2.0};
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.lambda(1), 2.0);
}

TEST(RandomWeightsTest, FirstLayerShape) {
  const RandomWeights w = InitRandomWeights(Net(1, 2, 3, 7));
  ASSERT_EQ(w.layers.size(), 1u);
  EXPECT_EQ(w.layers[0].rows(), 3);
  EXPECT_EQ(w.layers[0].cols(), 2);
}

TEST(RandomWeightsTest, DeepLayerShapes) {
  const RandomWeights w = InitRandomWeights(Net(3, 4, 2));
  EXPECT_EQ(w.layers[1].rows(), 6);
  EXPECT_EQ(w.layers[1].cols(), 4);
  EXPECT_EQ(w.layers[2].rows(), 6);
  EXPECT_EQ(w.layers[2].cols(), 4);
}

TEST(RandomWeightsTest, DeterministicAndBounded) {
  const RandomWeights a = InitRandomWeights(Net(3, 5, 4, 11));
  const RandomWeights b = InitRandomWeights(Net(3, 5, 4, 11));
  const RandomWeights c = InitRandomWeights(Net(3, 5, 4, 12));
  for (size_t l = 0; l < a.layers.size(); ++l) {
    EXPECT_EQ(a.layers[l], b.layers[l]);
    EXPECT_LE(MaxAbs(a.layers[l]), 1.0);
  }
  EXPECT_NE(a.layers[0], c.layers[0]);
}

TEST(ExtractFeaturesTest, HandForcedSingleLayer) {
  NetworkConfig c = Net(1, 1, 2);
  RandomWeights w;
  w.layers = {Matrix::Ones(2, 1)};
  Matrix x(1, 2);
  x << 1.0, 2.0;
  const auto f = ExtractFeatures(x, w, c);
  ASSERT_EQ(f.size(), 1u);
  Matrix expected(1, 3);
  expected << 3.0, 1.0, 2.0;
  EXPECT_EQ(f[0].design, expected);
}

TEST(ExtractFeaturesTest, ZeroInputGivesZeroDesign) {
  const NetworkConfig c = Net(3, 4, 5, 1);
  const auto f = ExtractFeatures(Matrix::Zero(6, 5), InitRandomWeights(c), c);
  ASSERT_EQ(f.size(), 3u);
  for (const auto& fb : f) {
    EXPECT_EQ(fb.design.cols(), 9);
    EXPECT_EQ(MaxAbs(fb.design), 0.0);
  }
}

TEST(ExtractFeaturesTest, SecondLayerMatchesTwoLineRecomputation) {
  std::mt19937_64 rng(3);
  NetworkConfig c = Net(2, 3, 4, 5);
  c.activation = Activation::kTanh;
  const RandomWeights w = InitRandomWeights(c);
  const Matrix x = RandomMatrix(5, 4, rng);
  const auto f = ExtractFeatures(x, w, c);

  const Matrix h1 = (x * w.layers[0]).array().tanh().matrix();
  Matrix in2(5, 7);
  in2 << h1, x;
  const Matrix h2 = (in2 * w.layers[1]).array().tanh().matrix();
  Matrix d2(5, 7);
  d2 << h2, x;
  EXPECT_LT(MaxAbs(f[1].design - d2), 1e-14);
  EXPECT_EQ(f[1].layer, 1);
}

TEST(ExtractFeaturesTest, ActivationsMatchDefinitions) {
  Matrix v(1, 3);
  v << -2.0, 0.0, 1.5;
  Matrix a = v;
  ApplyActivation(Activation::kLeakyRelu, a);
  EXPECT_DOUBLE_EQ(a(0, 0), -0.02);
  EXPECT_DOUBLE_EQ(a(0, 2), 1.5);
  a = v;
  ApplyActivation(Activation::kSigmoid, a);
  EXPECT_DOUBLE_EQ(a(0, 1), 0.5);
  a = v;
  ApplyActivation(Activation::kSwish, a);
  EXPECT_DOUBLE_EQ(a(0, 2), 1.5 / (1.0 + std::exp(-1.5)));
  a = v;
  ApplyActivation(Activation::kRelu, a);
  EXPECT_EQ(a(0, 0), 0.0);
}

TEST(ExtractFeaturesTest, OverflowNamesTheLayer) {
  NetworkConfig c = Net(2, 2, 2);
  RandomWeights w;
  w.layers = {Matrix::Constant(2, 2, 1e-300), Matrix::Constant(4, 2, 1e300)};
  const Matrix x = Matrix::Constant(1, 2, 1e300);
  try {
    ExtractFeatures(x, w, c, 9);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.layer_index(), 1);
    EXPECT_EQ(e.batch_index(), 9);
    EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos);
  }
}

TEST(ExtractFeaturesTest, RejectsWrongWidth) {
  const NetworkConfig c = Net(1, 2, 3);
  EXPECT_THROW(ExtractFeatures(Matrix::Zero(1, 4), InitRandomWeights(c), c),
               ContractError);
}

TEST(EnsembleTest, SingletonIsSoftmax) {
  std::mt19937_64 rng(4);
  const std::vector<Matrix> z = {RandomMatrix(4, 3, rng)};
  EXPECT_EQ(EnsembleDecision(z, EnsembleMode::kMean), RowSoftmax(z[0]));
}

TEST(EnsembleTest, IdenticalLearnersGiveSingleSoftmax) {
  std::mt19937_64 rng(5);
  const Matrix z = RandomMatrix(4, 3, rng);
  const std::vector<Matrix> zs = {z, z, z};
  EXPECT_LT(MaxAbs(EnsembleDecision(zs, EnsembleMode::kMean) - RowSoftmax(z)),
            1e-15);
  EXPECT_LT(
      MaxAbs(EnsembleDecision(zs, EnsembleMode::kMedian) - RowSoftmax(z)),
      1e-15);
}

TEST(EnsembleTest, HandArithmeticMean) {
  Matrix a(1, 2);
  a << 0.0, 0.0;
  Matrix b(1, 2);
  b << std::log(3.0), 0.0;
  const std::vector<Matrix> zs = {a, b};
  const Matrix p = EnsembleDecision(zs, EnsembleMode::kMean);
  EXPECT_NEAR(p(0, 0), 0.625, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.375, 1e-15);
}

TEST(EnsembleTest, RowsAreProbabilityVectors) {
  std::mt19937_64 rng(6);
  std::vector<Matrix> zs;
  for (int l = 0; l < 4; ++l) zs.push_back(RandomMatrix(10, 5, rng, 5.0));
  for (EnsembleMode mode : {EnsembleMode::kMean, EnsembleMode::kMedian}) {
    const Matrix p = EnsembleDecision(zs, mode);
    EXPECT_GE(p.minCoeff(), 0.0);
    for (Index i = 0; i < p.rows(); ++i) {
      EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
    }
  }
}

TEST(EnsembleTest, MeanIsPermutationInvariant) {
  std::mt19937_64 rng(7);
  std::vector<Matrix> zs;
  for (int l = 0; l < 5; ++l) zs.push_back(RandomMatrix(6, 4, rng, 3.0));
  const Matrix base = EnsembleDecision(zs, EnsembleMode::kMean);
  std::vector<Matrix> shuffled = zs;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[0], shuffled[2]);
  EXPECT_LT(MaxAbs(EnsembleDecision(shuffled, EnsembleMode::kMean) - base),
            1e-15);
}

TEST(EnsembleTest, EmptyListThrows) {
  const std::vector<Matrix> none;
  EXPECT_THROW(EnsembleDecision(none, EnsembleMode::kMean), ContractError);
}

TEST(InputStandardizerTest, FrozenAfterFirstFit) {
  std::mt19937_64 rng(8);
  const Matrix first = RandomMatrix(50, 3, rng, 4.0);
  InputStandardizer s;
  EXPECT_EQ(s.Apply(first), first);
  s.Fit(first);
  const Matrix z = s.Apply(first);
  for (Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(z.col(j).mean(), 0.0, 1e-12);
    EXPECT_NEAR(z.col(j).squaredNorm() / 50.0, 1.0, 1e-12);
  }
  s.Fit(RandomMatrix(50, 3, rng, 100.0));
  EXPECT_EQ(s.Apply(first), z);
}

}  // namespace
}  // namespace otcil
