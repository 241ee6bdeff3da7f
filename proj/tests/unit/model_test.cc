/*
 * Copyright 2026 The zslscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.h"
#include "test_util.h"
#include "zslscope/errors.h"
#include "zslscope/model.h"

namespace zslscope {
namespace {

MappingModel ConstantOutput(std::size_t d, const Vector& out) {
  MappingModel m = MappingModel::Zeros(d, 1, static_cast<std::size_t>(out.size()));
  m.b2 = out;
  return m;
}

TEST(ForwardTest, ZeroModelMapsToZero) {
  const MappingModel m = MappingModel::Zeros(4, 3, 2);
  EXPECT_TRUE(Forward(m, Vector::Constant(4, 2.5)).isZero(0.0));
}

TEST(ForwardTest, HandComputedReluNetwork) {
  MappingModel m = MappingModel::Zeros(2, 2, 1);
  m.w1 = Matrix::Identity(2, 2);
  m.w2 = Matrix{{1.0, 0.0}};
  EXPECT_DOUBLE_EQ(Forward(m, Vector{{3.0, -2.0}})(0), 3.0);
  EXPECT_DOUBLE_EQ(Forward(m, Vector{{-3.0, 2.0}})(0), 0.0);
  m.w2 = Matrix{{1.0, 1.0}};
  // The negative hidden unit is clipped instead of cancelling the first.
  EXPECT_DOUBLE_EQ(Forward(m, Vector{{3.0, -2.0}})(0), 3.0);
  m.b2 = Vector{{0.5}};
  EXPECT_DOUBLE_EQ(Forward(m, Vector{{1.0, 1.0}})(0), 2.5);
}

TEST(ForwardTest, ShapeAndBatchAgreement) {
  const MappingModel m = MappingModel::Initialize(6, 9, 4, 3);
  std::mt19937_64 rng(1);
  const Matrix x = testing::RandomNormal(5, 6, rng);
  const Matrix batch = ForwardBatch(m, x);
  ASSERT_EQ(batch.rows(), 5);
  ASSERT_EQ(batch.cols(), 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    const Vector single = Forward(m, xi);
    EXPECT_EQ(single.size(), 4);
    const std::vector<double> naive = oracle::NaiveForward(m, xi.data());
    for (Eigen::Index k = 0; k < 4; ++k) {
      EXPECT_NEAR(batch(i, k), single(k), 1e-12);
      EXPECT_NEAR(single(k), naive[static_cast<std::size_t>(k)], 1e-12);
    }
  }
}

TEST(ForwardTest, DimensionMismatchThrows) {
  const MappingModel m = MappingModel::Zeros(3, 2, 2);
  EXPECT_THROW(Forward(m, Vector::Zero(4)), InvalidArgument);
  EXPECT_THROW(ForwardBatch(m, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(ModelTest, InitializeIsSeededGlorotUniform) {
  const MappingModel a = MappingModel::Initialize(10, 20, 5, 7);
  const MappingModel b = MappingModel::Initialize(10, 20, 5, 7);
  const MappingModel c = MappingModel::Initialize(10, 20, 5, 8);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  EXPECT_LE(a.w1.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 30.0));
  EXPECT_LE(a.w2.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 25.0));
  EXPECT_TRUE(a.b1.isZero(0.0));
  EXPECT_TRUE(a.b2.isZero(0.0));
  EXPECT_EQ(a.num_parameters(), 10u * 20 + 20 + 20 * 5 + 5);
  EXPECT_TRUE(a.AllFinite());
}

TEST(CompatibilityTest, Examples) {
  EXPECT_EQ(Compatibility(Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}), 0.0);
  const Vector z{{1.5, -2.0, 0.5}};
  EXPECT_DOUBLE_EQ(Compatibility(z, z), z.squaredNorm());
  EXPECT_EQ(Compatibility(Vector{{1.0, 2.0, 3.0}}, Vector{{4.0, 5.0, 6.0}}), 32.0);
  EXPECT_THROW(Compatibility(Vector::Zero(2), Vector::Zero(3)), InvalidArgument);
}

TEST(CompatibilityTest, WeightedExamples) {
  EXPECT_EQ(WeightedCompatibility(Vector{{1.0, 2.0}}, Vector{{3.0, 4.0}},
                                  Vector{{1.0, 0.5}}),
            7.0);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector z1 = testing::RandomVector(7, rng);
    const Vector z2 = testing::RandomVector(7, rng);
    EXPECT_EQ(WeightedCompatibility(z1, z2, UnitWeights(7)), Compatibility(z1, z2));
    EXPECT_EQ(WeightedCompatibility(z1, z2, Vector::Zero(7)), 0.0);
  }
}

TEST(CompatibilityTest, WeightedRejectsBadWeights) {
  const Vector z = Vector::Ones(2);
  EXPECT_THROW(WeightedCompatibility(z, z, Vector{{1.0, 1.5}}), InvalidArgument);
  EXPECT_THROW(WeightedCompatibility(z, z, Vector{{-0.1, 1.0}}), InvalidArgument);
  EXPECT_THROW(WeightedCompatibility(z, z, Vector::Ones(3)), InvalidArgument);
}

TEST(LossTest, HandExampleEqualsTwo) {
  // f(x) = (1, -1); true class (0, 1); the other seen class (1, 0).
  const MappingModel m = ConstantOutput(1, Vector{{1.0, -1.0}});
  const Matrix z{{0.0, 1.0}, {1.0, 0.0}};
  const std::vector<ClassIndex> labels = {0};
  const std::vector<ClassIndex> seen = {0, 1};
  const LossAndGradient lg = ComputeLossAndGradient(
      m, Matrix::Zero(1, 1), labels, z, seen, UnitWeights(2), 0.0, 0.0);
  EXPECT_DOUBLE_EQ(lg.loss, 2.0);
  // d loss / d b2 = z_violator - z_true.
  EXPECT_DOUBLE_EQ(lg.gradient.b2(0), 1.0);
  EXPECT_DOUBLE_EQ(lg.gradient.b2(1), -1.0);
}

TEST(LossTest, InactiveHingeHasZeroLossAndGradient) {
  const MappingModel m = ConstantOutput(2, Vector{{2.0, 0.0}});
  const Matrix z{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
  const std::vector<ClassIndex> labels = {0, 0};
  const std::vector<ClassIndex> seen = {0, 1, 2};
  const LossAndGradient lg = ComputeLossAndGradient(
      m, Matrix::Ones(2, 2), labels, z, seen, UnitWeights(2), 0.5, 0.0);
  EXPECT_EQ(lg.loss, 0.0);
  for (double g : oracle::Flatten(lg.gradient)) EXPECT_EQ(g, 0.0);
}

TEST(LossTest, MatchesNaiveLoss) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    MappingModel m = MappingModel::Initialize(5, 6, 4, trial);
    m.b1 = testing::RandomVector(6, rng, 0.3);
    m.b2 = testing::RandomVector(4, rng, 0.3);
    const Matrix x = testing::RandomNormal(7, 5, rng);
    const Matrix z = testing::RandomNormal(4, 4, rng);
    std::vector<ClassIndex> labels;
    for (int i = 0; i < 7; ++i) labels.push_back(static_cast<ClassIndex>(i % 3));
    const std::vector<ClassIndex> seen = {0, 1, 2};
    const Vector w{{1.0, 0.3, 0.0, 0.8}};
    const double naive =
        oracle::NaiveLoss(m, x, labels, z, seen, w, 0.2, 1e-3);
    const double fast =
        ComputeLossAndGradient(m, x, labels, z, seen, w, 0.2, 1e-3).loss;
    EXPECT_NEAR(fast, naive, 1e-12 * std::max(1.0, naive));
    EXPECT_GE(fast, 0.0);
  }
}

TEST(LossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  while (checked < 25) {
    const auto d = static_cast<std::size_t>(dim(rng));
    const auto h = static_cast<std::size_t>(dim(rng));
    const auto a = static_cast<std::size_t>(dim(rng));
    const std::size_t classes = 2 + static_cast<std::size_t>(dim(rng) % 4);
    const std::size_t batch = 1 + static_cast<std::size_t>(dim(rng) % 5);
    MappingModel m = MappingModel::Initialize(d, h, a, rng());
    m.b1 = testing::RandomVector(static_cast<Eigen::Index>(h), rng, 0.5);
    m.b2 = testing::RandomVector(static_cast<Eigen::Index>(a), rng, 0.5);
    const Matrix x = testing::RandomNormal(static_cast<Eigen::Index>(batch),
                                           static_cast<Eigen::Index>(d), rng);
    const Matrix z = testing::RandomNormal(static_cast<Eigen::Index>(classes),
                                           static_cast<Eigen::Index>(a), rng);
    std::vector<ClassIndex> seen(classes);
    for (std::size_t c = 0; c < classes; ++c) seen[c] = c;
    std::vector<ClassIndex> labels;
    for (std::size_t i = 0; i < batch; ++i) labels.push_back(rng() % classes);
    Vector w(static_cast<Eigen::Index>(a));
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = unit(rng);
    const double margin = unit(rng);
    const double decay = 0.01 * unit(rng);
    if (oracle::KinkDistance(m, x, labels, z, seen, w, margin) < 1e-3) continue;

    const LossAndGradient lg =
        ComputeLossAndGradient(m, x, labels, z, seen, w, margin, decay);
    const std::vector<double> numeric = oracle::NumericGradient(
        m, x, labels, z, seen, w, margin, decay, 1e-5);
    EXPECT_LE(oracle::MaxRelativeError(oracle::Flatten(lg.gradient), numeric),
              1e-4);
    ++checked;
  }
}

TEST(LossTest, Errors) {
  const MappingModel m = MappingModel::Zeros(2, 2, 2);
  const Matrix z = Matrix::Identity(2, 2);
  const std::vector<ClassIndex> seen = {0, 1};
  const std::vector<ClassIndex> none;
  EXPECT_THROW(ComputeLossAndGradient(m, Matrix::Zero(0, 2), none, z, seen,
                                      UnitWeights(2), 0.1, 0.0),
               InvalidArgument);
  const std::vector<ClassIndex> one = {0};
  const std::vector<ClassIndex> only_true = {0};
  EXPECT_THROW(ComputeLossAndGradient(m, Matrix::Zero(1, 2), one, z, only_true,
                                      UnitWeights(2), 0.1, 0.0),
               InvalidArgument);
}

TEST(PredictTest, Examples) {
  const MappingModel m = ConstantOutput(1, Vector{{1.0, 0.0}});
  const Matrix z{{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  const Vector x = Vector::Zero(1);
  const std::vector<ClassIndex> single = {1};
  EXPECT_EQ(Predict(m, x, single, z, UnitWeights(2)), 1u);
  const std::vector<ClassIndex> ab = {0, 1};
  EXPECT_EQ(Predict(m, x, ab, z, UnitWeights(2)), 0u);
  const std::vector<ClassIndex> tied = {2, 0};
  EXPECT_EQ(Predict(m, x, tied, z, UnitWeights(2)), 0u);
  const std::vector<ClassIndex> none;
  EXPECT_THROW(Predict(m, x, none, z, UnitWeights(2)), InvalidArgument);
}

TEST(PredictTest, ScaleInvarianceAndWeightZeroInvariance) {
  std::mt19937_64 rng(6);
  const Matrix mapped = testing::RandomNormal(200, 5, rng);
  const Matrix z = testing::RandomNormal(6, 5, rng);
  const std::vector<ClassIndex> classes = {0, 1, 2, 3, 4, 5};
  Vector w{{1.0, 0.7, 0.0, 0.4, 1.0}};
  const std::vector<ClassIndex> base = PredictMapped(mapped, classes, z, w);
  EXPECT_EQ(PredictMapped(mapped, classes, 3.7 * z, w), base);
  Matrix scrambled = z;
  scrambled.col(2) = testing::RandomVector(6, rng, 10.0);
  EXPECT_EQ(PredictMapped(mapped, classes, scrambled, w), base);
}

Dataset LabeledDataset(std::size_t first, std::size_t second) {
  Dataset ds;
  const auto n = static_cast<Eigen::Index>(first + second);
  ds.features = Matrix::Zero(n, 1);
  for (std::size_t i = 0; i < first + second; ++i) ds.labels.push_back(i < first ? 0 : 1);
  ds.class_names = {"a", "b"};
  ds.raw_attributes = Matrix{{1.0}, {-1.0}};
  ds.attribute_names = {"k"};
  return ds;
}

TEST(EvaluateTest, UnbalancedCounts) {
  // Every instance maps to +1, so class "a" is always predicted.
  const Dataset ds = LabeledDataset(90, 10);
  const MappingModel m = ConstantOutput(1, Vector{{1.0}});
  std::vector<InstanceIndex> all(100);
  for (std::size_t i = 0; i < 100; ++i) all[i] = i;
  const std::vector<ClassIndex> classes = {0, 1};
  const Metrics metrics =
      Evaluate(m, all, classes, ds, ds.raw_attributes, UnitWeights(1));
  EXPECT_DOUBLE_EQ(metrics.overall_accuracy, 0.9);
  EXPECT_DOUBLE_EQ(metrics.mean_per_class_accuracy, 0.5);
  EXPECT_EQ(metrics.correct, 90u);
  EXPECT_EQ(metrics.total, 100u);
  EXPECT_EQ(metrics.per_class.at(0).correct, 90u);
  EXPECT_EQ(metrics.per_class.at(1).correct, 0u);
}

TEST(EvaluateTest, BalancedHalfRight) {
  const Dataset ds = LabeledDataset(5, 5);
  const MappingModel m = ConstantOutput(1, Vector{{-1.0}});
  const std::vector<InstanceIndex> all = InstancesOfClasses(ds, std::vector<ClassIndex>{0, 1});
  const std::vector<ClassIndex> classes = {0, 1};
  const Metrics metrics =
      Evaluate(m, all, classes, ds, ds.raw_attributes, UnitWeights(1));
  EXPECT_DOUBLE_EQ(metrics.overall_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(metrics.mean_per_class_accuracy, 0.5);
}

TEST(EvaluateTest, LabelOutsideCandidatesThrows) {
  const Dataset ds = LabeledDataset(2, 2);
  const MappingModel m = ConstantOutput(1, Vector{{1.0}});
  const std::vector<InstanceIndex> all = {0, 1, 2, 3};
  const std::vector<ClassIndex> only_a = {0};
  EXPECT_THROW(Evaluate(m, all, only_a, ds, ds.raw_attributes, UnitWeights(1)),
               InvalidArgument);
}

TEST(TrainConfigTest, ValidatesBounds) {
  TrainConfig config;
  EXPECT_NO_THROW(config.Validate());
  config.epochs = 0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.momentum = 1.0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.learning_rate = 0.0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.batch_size = 0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.margin = -0.1;
  EXPECT_THROW(config.Validate(), InvalidArgument);
}

}  // namespace
}  // namespace zslscope
