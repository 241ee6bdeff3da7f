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

#include <vector>

#include "oracles.h"
#include "test_util.h"
#include "zslscope/diagnostics.h"
#include "zslscope/errors.h"

namespace zslscope {
namespace {

MispredictionRecord HandRecord() {
  MispredictionRecord r;
  r.instance = 0;
  r.true_class = 1;
  r.predicted_class = 0;
  r.mapped = Vector{{1.0, -1.0}};
  r.contributions = Vector{{1.0, 1.0}};
  return r;
}

TEST(ContributionsTest, HandExamples) {
  const Vector p = AttributeContributions(Vector{{1.0, -1.0}}, Vector{{0.0, 1.0}},
                                          Vector{{1.0, 0.0}});
  EXPECT_EQ(p(0), 1.0);
  EXPECT_EQ(p(1), 1.0);
  EXPECT_EQ(p.sum(), Compatibility(Vector{{1.0, -1.0}}, Vector{{1.0, 0.0}}) -
                         Compatibility(Vector{{1.0, -1.0}}, Vector{{0.0, 1.0}}));
  EXPECT_TRUE(AttributeContributions(Vector{{2.0, 3.0}}, Vector{{1.0, 1.0}},
                                     Vector{{1.0, 1.0}})
                  .isZero(0.0));
  EXPECT_THROW(AttributeContributions(Vector::Zero(2), Vector::Zero(3),
                                      Vector::Zero(2)),
               InvalidArgument);
}

TEST(CollectTest, ZeroModelTiesGoToLowestClass) {
  Dataset ds;
  ds.features = Matrix::Ones(6, 2);
  ds.labels = {0, 0, 1, 1, 2, 2};
  ds.class_names = {"a", "b", "c"};
  ds.raw_attributes = Matrix{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  ds.attribute_names = {"x", "y"};
  const MappingModel zero = MappingModel::Zeros(2, 3, 2);
  const std::vector<InstanceIndex> diag = {0, 1, 2, 3, 4, 5};
  const std::vector<ClassIndex> seen = {0, 1, 2};
  const auto records = CollectMispredictions(zero, diag, seen, ds,
                                             ds.raw_attributes, UnitWeights(2));
  ASSERT_EQ(records.size(), 4u);
  const std::vector<InstanceIndex> expected = {2, 3, 4, 5};
  for (std::size_t r = 0; r < records.size(); ++r) {
    EXPECT_EQ(records[r].instance, expected[r]);
    EXPECT_EQ(records[r].predicted_class, 0u);
    EXPECT_EQ(records[r].true_class, ds.labels[expected[r]]);
    EXPECT_TRUE(records[r].contributions.isZero(0.0));
  }
}

TEST(CollectTest, PerfectModelHasNoRecords) {
  Dataset ds;
  ds.features = Matrix::Identity(3, 3);
  ds.labels = {0, 1, 2};
  ds.class_names = {"a", "b", "c"};
  ds.raw_attributes = Matrix::Identity(3, 3);
  ds.attribute_names = {"x", "y", "z"};
  // relu(x) - relu(-x) = x.
  MappingModel identity = MappingModel::Zeros(3, 6, 3);
  identity.w1.topRows(3) = Matrix::Identity(3, 3);
  identity.w1.bottomRows(3) = -Matrix::Identity(3, 3);
  identity.w2.leftCols(3) = Matrix::Identity(3, 3);
  identity.w2.rightCols(3) = -Matrix::Identity(3, 3);
  const std::vector<InstanceIndex> diag = {0, 1, 2};
  const std::vector<ClassIndex> seen = {0, 1, 2};
  EXPECT_TRUE(CollectMispredictions(identity, diag, seen, ds, ds.raw_attributes,
                                    UnitWeights(3))
                  .empty());
}

TEST(CollectTest, RecordsSatisfyWeightedSumIdentity) {
  const testing::SmallSession s = testing::MakeSmallSession(21);
  const Vector w{{1.0, 0.6, 0.0, 0.9, 0.3}};
  const MappingModel m = MappingModel::Initialize(8, 10, 5, 2);
  const Matrix& z = s.signatures.signatures;
  const auto records = CollectMispredictions(m, s.split.diag_instances,
                                             s.split.seen_classes, s.dataset, z, w);
  ASSERT_FALSE(records.empty());
  for (const MispredictionRecord& r : records) {
    EXPECT_NE(r.predicted_class, r.true_class);
    const Vector x = s.dataset.features.row(static_cast<Eigen::Index>(r.instance)).transpose();
    const std::vector<double> f = oracle::NaiveForward(m, x.data());
    const double gap = oracle::NaiveWeightedScore(f, z, r.predicted_class, w) -
                       oracle::NaiveWeightedScore(f, z, r.true_class, w);
    EXPECT_NEAR(r.contributions.sum(), gap, 1e-9);
    EXPECT_GT(gap, 0.0);
  }
}

TEST(AggregateTest, HandExample) {
  const std::vector<MispredictionRecord> records = {HandRecord()};
  const std::vector<ClassIndex> selected = {1};
  const std::vector<std::size_t> counts = {4, 2};
  const DiagnosticsSummary s = AggregateScores(records, selected, counts, 2);
  EXPECT_EQ(s.q_over()(0, 0), 0.5);
  EXPECT_EQ(s.q_under()(1, 0), 0.5);
  EXPECT_EQ(s.q_over()(1, 0), 0.0);
  EXPECT_EQ(s.q_under()(0, 0), 0.0);
  EXPECT_EQ(s.counts(), std::vector<std::size_t>{2});
  const auto& breakdown = s.Breakdown(0, 0, Side::kOver);
  ASSERT_EQ(breakdown.size(), 1u);
  EXPECT_EQ(breakdown.at(0), 0.5);
  EXPECT_TRUE(s.Breakdown(0, 0, Side::kUnder).empty());
}

TEST(AggregateTest, EmptyAndUnselected) {
  const std::vector<ClassIndex> selected = {0};
  const std::vector<std::size_t> counts = {3, 2};
  const std::vector<MispredictionRecord> none;
  const DiagnosticsSummary empty = AggregateScores(none, selected, counts, 2);
  EXPECT_TRUE(empty.q_over().isZero(0.0));
  EXPECT_TRUE(empty.q_under().isZero(0.0));
  // The hand record's true class is 1, which is not selected.
  const std::vector<MispredictionRecord> records = {HandRecord()};
  EXPECT_TRUE(AggregateScores(records, selected, counts, 2).q_over().isZero(0.0));
}

TEST(AggregateTest, NegativeContributionsAreIgnored) {
  MispredictionRecord r = HandRecord();
  r.mapped = Vector{{2.0, 1.0}};
  r.contributions = Vector{{3.0, -1.0}};
  const std::vector<MispredictionRecord> records = {r};
  const std::vector<ClassIndex> selected = {1};
  const std::vector<std::size_t> counts = {1, 1};
  const DiagnosticsSummary s = AggregateScores(records, selected, counts, 2);
  EXPECT_EQ(s.q_over()(0, 0), 3.0);
  EXPECT_EQ(s.q_over()(1, 0), 0.0);
  EXPECT_EQ(s.q_under()(1, 0), 0.0);
}

TEST(AggregateTest, DuplicationIsLinear) {
  const std::vector<MispredictionRecord> once = {HandRecord()};
  const std::vector<MispredictionRecord> twice = {HandRecord(), HandRecord()};
  const std::vector<ClassIndex> selected = {1};
  const std::vector<std::size_t> counts = {1, 2};
  const std::vector<std::size_t> doubled = {2, 4};
  const DiagnosticsSummary base = AggregateScores(once, selected, counts, 2);
  const DiagnosticsSummary dup = AggregateScores(twice, selected, counts, 2);
  const DiagnosticsSummary rescaled = AggregateScores(twice, selected, doubled, 2);
  EXPECT_TRUE(dup.q_over().isApprox(2.0 * base.q_over()));
  EXPECT_TRUE(dup.q_under().isApprox(2.0 * base.q_under()));
  EXPECT_TRUE(rescaled.q_over().isApprox(base.q_over()));
  EXPECT_TRUE(rescaled.q_under().isApprox(base.q_under()));
}

TEST(AggregateTest, ZeroCountSelectionThrows) {
  const std::vector<MispredictionRecord> none;
  const std::vector<ClassIndex> selected = {0};
  const std::vector<std::size_t> counts = {0, 2};
  EXPECT_THROW(AggregateScores(none, selected, counts, 2), InvalidArgument);
}

TEST(AggregateTest, InvariantsOnRandomSession) {
  const testing::SmallSession s = testing::MakeSmallSession(22);
  const Vector w{{0.5, 1.0, 0.8, 1.0, 0.2}};
  const MappingModel m = MappingModel::Initialize(8, 12, 5, 4);
  const auto records =
      CollectMispredictions(m, s.split.diag_instances, s.split.seen_classes,
                            s.dataset, s.signatures.signatures, w);
  const auto counts = CountPerClass(s.dataset, s.split.diag_instances);
  const DiagnosticsSummary summary =
      AggregateScores(records, s.split.seen_classes, counts, 5);

  // Independent recomputation of every cell from the records.
  Matrix over = Matrix::Zero(5, static_cast<Eigen::Index>(s.split.seen_classes.size()));
  Matrix under = over;
  for (const MispredictionRecord& r : records) {
    const auto col = static_cast<Eigen::Index>(summary.ColumnOf(r.true_class));
    for (Eigen::Index k = 0; k < 5; ++k) {
      const double p = r.contributions(k);
      if (p <= 0.0) continue;
      const double share = p / static_cast<double>(counts[r.true_class]);
      (r.mapped(k) > 0.0 ? over : under)(k, col) += share;
    }
  }
  EXPECT_LE((over - summary.q_over()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((under - summary.q_under()).cwiseAbs().maxCoeff(), 1e-12);

  for (Side side : {Side::kOver, Side::kUnder}) {
    const Matrix& q = summary.q(side);
    EXPECT_GE(q.minCoeff(), 0.0);
    for (AttributeIndex k = 0; k < 5; ++k) {
      for (std::size_t j = 0; j < s.split.seen_classes.size(); ++j) {
        double total = 0.0;
        for (const auto& [predicted, value] : summary.Breakdown(k, j, side)) {
          EXPECT_GE(value, 0.0);
          EXPECT_NE(predicted, s.split.seen_classes[j]);
          total += value;
        }
        EXPECT_NEAR(total, q(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)), 1e-9);
      }
    }
  }
}

DiagnosticsSummary SummaryWithUnder(const std::vector<double>& row_sums) {
  DiagnosticsSummary s(row_sums.size(), {0}, {1});
  for (AttributeIndex k = 0; k < row_sums.size(); ++k) {
    if (row_sums[k] > 0.0) s.Add(k, 0, Side::kUnder, 1, row_sums[k]);
  }
  return s;
}

TEST(SortTest, ByUnderOverAndTotal) {
  const DiagnosticsSummary s = SummaryWithUnder({0.2, 0.9, 0.5});
  EXPECT_EQ(SortAttributes(s, SortKey::kUnder).order,
            (std::vector<AttributeIndex>{1, 2, 0}));
  EXPECT_EQ(SortAttributes(s, SortKey::kTotal).order,
            SortAttributes(s, SortKey::kUnder).order);
  EXPECT_EQ(SortAttributes(s, SortKey::kOver).order,
            (std::vector<AttributeIndex>{0, 1, 2}));
}

TEST(SortTest, AllZeroIsIdentity) {
  const DiagnosticsSummary s(4, {0, 1}, {1, 1});
  for (SortKey key : {SortKey::kUnder, SortKey::kOver, SortKey::kTotal}) {
    EXPECT_EQ(SortAttributes(s, key).order,
              (std::vector<AttributeIndex>{0, 1, 2, 3}));
  }
}

TEST(SortTest, TotalCombinesSides) {
  DiagnosticsSummary s(3, {0}, {1});
  s.Add(0, 0, Side::kOver, 1, 0.4);
  s.Add(0, 0, Side::kUnder, 1, 0.4);
  s.Add(1, 0, Side::kOver, 1, 0.7);
  s.Add(2, 0, Side::kUnder, 1, 0.1);
  EXPECT_EQ(SortAttributes(s, SortKey::kTotal).order,
            (std::vector<AttributeIndex>{0, 1, 2}));
  EXPECT_EQ(SortAttributes(s, SortKey::kOver).order,
            (std::vector<AttributeIndex>{1, 0, 2}));
}

TEST(SortTest, UnseenSum) {
  const DiagnosticsSummary s(3, {0}, {1});
  const Matrix unseen{{1.0, -1.0, 2.0}, {0.0, 3.0, -1.0}};
  const AttributeOrdering ordering = SortAttributes(s, SortKey::kUnseenSum, unseen);
  EXPECT_EQ(ordering.key, SortKey::kUnseenSum);
  EXPECT_EQ(ordering.order, (std::vector<AttributeIndex>{1, 0, 2}));
  EXPECT_THROW(SortAttributes(s, SortKey::kUnseenSum), InvalidArgument);
  EXPECT_THROW(SortAttributes(s, SortKey::kUnseenSum, Matrix(0, 3)), InvalidArgument);
}

TEST(SortTest, KeyNames) {
  for (SortKey key : {SortKey::kUnder, SortKey::kOver, SortKey::kTotal,
                      SortKey::kUnseenSum}) {
    EXPECT_EQ(ParseSortKey(SortKeyName(key)), key);
  }
  EXPECT_THROW(ParseSortKey("size"), InvalidArgument);
  EXPECT_EQ(ParseSide("over"), Side::kOver);
  EXPECT_EQ(ParseSide("under"), Side::kUnder);
  EXPECT_THROW(ParseSide("left"), InvalidArgument);
}

TEST(StackingTest, DescendingTotalsWithIndexTieBreak) {
  DiagnosticsSummary s(2, {4, 7, 9}, {1, 1, 1});
  s.Add(0, 0, Side::kOver, 1, 2.0);
  s.Add(1, 0, Side::kUnder, 1, 1.0);
  s.Add(0, 1, Side::kOver, 1, 1.0);
  s.Add(1, 2, Side::kUnder, 1, 2.0);
  EXPECT_EQ(StackingOrder(s, StackBasis::kTotal),
            (std::vector<ClassIndex>{4, 9, 7}));

  DiagnosticsSummary tied(1, {5, 2, 8}, {1, 1, 1});
  EXPECT_EQ(StackingOrder(tied, StackBasis::kTotal),
            (std::vector<ClassIndex>{2, 5, 8}));

  const DiagnosticsSummary single(3, {6}, {2});
  EXPECT_EQ(StackingOrder(single, StackBasis::kOver), std::vector<ClassIndex>{6});
}

TEST(StackingTest, PerSideBasis) {
  DiagnosticsSummary s(1, {0, 1}, {1, 1});
  s.Add(0, 0, Side::kOver, 1, 1.0);
  s.Add(0, 1, Side::kUnder, 0, 3.0);
  EXPECT_EQ(StackingOrder(s, StackBasis::kOver), (std::vector<ClassIndex>{0, 1}));
  EXPECT_EQ(StackingOrder(s, StackBasis::kUnder), (std::vector<ClassIndex>{1, 0}));
  EXPECT_EQ(StackingOrder(s, StackBasis::kTotal), (std::vector<ClassIndex>{1, 0}));
}

}  // namespace
}  // namespace zslscope
