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

#ifndef ZSLSCOPE_DIAGNOSTICS_H_
#define ZSLSCOPE_DIAGNOSTICS_H_

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "zslscope/dataset.h"
#include "zslscope/model.h"
#include "zslscope/types.h"

namespace zslscope {

// A held-out seen instance the model assigned to the wrong class.
//
// `contributions[k]` is the share of attribute k in the score gap:
//   mapped_k * (w_k z_{predicted,k} - w_k z_{true,k}),
// so the contributions sum to s_w(mapped, z_pred) - s_w(mapped, z_true) > 0.
struct MispredictionRecord {
  InstanceIndex instance = 0;
  ClassIndex true_class = 0;
  ClassIndex predicted_class = 0;
  Vector mapped;
  Vector contributions;
};

// p_k = mapped_k * (z_pred_k - z_true_k).
Vector AttributeContributions(const Vector& mapped, const Vector& z_true,
                              const Vector& z_pred);

// Predicts every instance in `instances` among `seen_classes` under weights
// `w` and keeps the wrong ones, in the order of `instances`.
std::vector<MispredictionRecord> CollectMispredictions(
    const MappingModel& model, std::span<const InstanceIndex> instances,
    std::span<const ClassIndex> seen_classes, const Dataset& dataset,
    const Matrix& signatures, const Vector& attribute_weights);

enum class Side { kOver, kUnder };

std::string_view SideName(Side side);
Side ParseSide(std::string_view name);  // "over" | "under"

// Over/under-prediction scores per (attribute, selected category).
//
// Only positive contributions are accumulated. A positive p_k goes to
// q_over when mapped_k > 0 and to q_under when mapped_k < 0, scaled by
// 1 / n_y where n_y is the category's holdout instance count.
class DiagnosticsSummary {
 public:
  DiagnosticsSummary(std::size_t num_attributes,
                     std::vector<ClassIndex> selected_categories,
                     std::vector<std::size_t> counts);

  std::size_t num_attributes() const {
    return static_cast<std::size_t>(q_over_.rows());
  }
  const std::vector<ClassIndex>& selected_categories() const {
    return selected_;
  }
  // Holdout counts aligned with selected_categories().
  const std::vector<std::size_t>& counts() const { return counts_; }

  // a x |selected|, column j <-> selected_categories()[j].
  const Matrix& q_over() const { return q_over_; }
  const Matrix& q_under() const { return q_under_; }
  const Matrix& q(Side side) const {
    return side == Side::kOver ? q_over_ : q_under_;
  }

  // Column of a selected category; throws InvalidArgument otherwise.
  std::size_t ColumnOf(ClassIndex category) const;

  // predicted class -> accumulated contribution for one cell.
  const std::map<ClassIndex, double>& Breakdown(AttributeIndex attribute,
                                                std::size_t column,
                                                Side side) const;

  void Add(AttributeIndex attribute, std::size_t column, Side side,
           ClassIndex predicted_class, double amount);

 private:
  std::size_t CellIndex(AttributeIndex attribute, std::size_t column,
                        Side side) const;

  std::vector<ClassIndex> selected_;
  std::vector<std::size_t> counts_;
  Matrix q_over_;
  Matrix q_under_;
  std::vector<std::map<ClassIndex, double>> breakdown_;
};

// `class_counts` is indexed by class (see CountPerClass). Records whose true
// class is not selected are ignored.
DiagnosticsSummary AggregateScores(
    std::span<const MispredictionRecord> records,
    std::span<const ClassIndex> selected_categories,
    std::span<const std::size_t> class_counts, std::size_t num_attributes);

enum class SortKey { kUnder, kOver, kTotal, kUnseenSum };

std::string_view SortKeyName(SortKey key);
SortKey ParseSortKey(std::string_view name);  // under|over|total|unseen_sum

struct AttributeOrdering {
  SortKey key = SortKey::kTotal;
  std::vector<AttributeIndex> order;  // descending by key, stable
};

// Throws InvalidArgument for kUnseenSum, which needs unseen signatures.
AttributeOrdering SortAttributes(const DiagnosticsSummary& summary,
                                 SortKey key);

// `unseen_signatures` holds one row per selected unseen class.
AttributeOrdering SortAttributes(const DiagnosticsSummary& summary,
                                 SortKey key,
                                 const Matrix& unseen_signatures);

// Which q matrix feeds the category totals used for stacking.
enum class StackBasis { kOver, kUnder, kTotal };

// Selected categories ordered by descending summed score over all
// attributes, ties by ascending class index. Position 0 sits at the
// baseline. The order is shared by every attribute row.
std::vector<ClassIndex> StackingOrder(const DiagnosticsSummary& summary,
                                      StackBasis basis);

}  // namespace zslscope

#endif  // ZSLSCOPE_DIAGNOSTICS_H_
