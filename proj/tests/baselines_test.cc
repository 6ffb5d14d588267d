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

#include "otcil/baselines.h"

#include <vector>

#include "gtest/gtest.h"
#include "otcil/config.h"
#include "otcil/errors.h"
#include "otcil/experiment.h"

namespace otcil {
namespace {

RunConfig SyntheticConfig(int tasks, double separation) {
  RunConfig c;
  c.dataset.synthetic.classes = 10;
  c.dataset.synthetic.dims = 16;
  c.dataset.synthetic.separation = separation;
  c.dataset.synthetic.samples_per_class = 60;
  c.dataset.synthetic.test_per_class = 40;
  c.task_split.tasks = tasks;
  c.batch_size = 20;
  c.network.layers = 2;
  c.network.nodes = 32;
  c.seeds = {7, 8, 9};
  c.network.seed = 7;
  c.task_split.order_seed = 8;
  c.dataset.synthetic.seed = 9;
  return c;
}

TEST(BaselineKindTest, NamesRoundTrip) {
  for (auto k : {BaselineKind::kOffline, BaselineKind::kSeparate,
                 BaselineKind::kFineTune, BaselineKind::kNonIncremental}) {
    EXPECT_EQ(ParseBaselineKind(BaselineKindName(k)), k);
  }
  EXPECT_THROW(ParseBaselineKind("oracle"), ContractError);
}

TEST(BaselineTest, SingleTaskMakesAllBaselinesCoincide) {
  const RunConfig c = SyntheticConfig(1, 3.0);
  const PreparedRun run = PrepareRun(c);
  std::vector<double> acc;
  for (auto k : c.baselines) {
    acc.push_back(FitBaseline(k, run.stream, run.test, run.task_classes,
                              run.network)
                      .accuracy);
  }
  for (double a : acc) EXPECT_EQ(a, acc.front());
}

TEST(BaselineTest, OfflineSolvesSeparableData) {
  const RunConfig c = SyntheticConfig(5, 8.0);
  const PreparedRun run = PrepareRun(c);
  const BaselineRecord r = FitBaseline(BaselineKind::kOffline, run.stream,
                                       run.test, run.task_classes, run.network);
  EXPECT_GT(r.accuracy, 0.95);
  ASSERT_EQ(r.task_accuracy.size(), 5u);
}

TEST(BaselineTest, NonIncrementalOnlyKnowsTheFirstTask) {
  // First task holds 2 of 10 balanced classes.
  const RunConfig c = SyntheticConfig(5, 8.0);
  const PreparedRun run = PrepareRun(c);
  const BaselineRecord r =
      FitBaseline(BaselineKind::kNonIncremental, run.stream, run.test,
                  run.task_classes, run.network);
  EXPECT_NEAR(r.accuracy, 0.20, 0.05);
  EXPECT_GT(r.task_accuracy[0], 0.9);
}

TEST(BaselineTest, FineTuneForgetsEarlierTasks) {
  const RunConfig c = SyntheticConfig(5, 8.0);
  const PreparedRun run = PrepareRun(c);
  const BaselineRecord r = FitBaseline(BaselineKind::kFineTune, run.stream,
                                       run.test, run.task_classes, run.network);
  EXPECT_GT(r.task_accuracy[4], 0.9);
  EXPECT_LT(r.task_accuracy[0], 0.1);
}

TEST(BaselineTest, SeparateExpertsScoreOwnTasks) {
  const RunConfig c = SyntheticConfig(5, 8.0);
  const PreparedRun run = PrepareRun(c);
  const BaselineRecord r = FitBaseline(BaselineKind::kSeparate, run.stream,
                                       run.test, run.task_classes, run.network);
  for (double a : r.task_accuracy) EXPECT_GT(a, 0.9);
  EXPECT_GT(r.accuracy, 0.9);
}

TEST(BaselineTest, MissingAnnotationsAreRejected) {
  const RunConfig c = SyntheticConfig(5, 4.0);
  PreparedRun run = PrepareRun(c);
  run.stream.annotations = BoundaryAnnotations();
  EXPECT_THROW(FitBaseline(BaselineKind::kSeparate, run.stream, run.test,
                           run.task_classes, run.network),
               ContractError);
}

}  // namespace
}  // namespace otcil
