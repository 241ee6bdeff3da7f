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

#include "zslscope/diagnostics.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "zslscope/errors.h"

namespace zslscope {

Vector AttributeContributions(const Vector& mapped, const Vector& z_true,
                              const Vector& z_pred) {
  if (mapped.size() != z_true.size() || mapped.size() != z_pred.size()) {
    throw InvalidArgument("attribute contributions: dimension mismatch");
  }
  return mapped.cwiseProduct(z_pred - z_true);
}

std::vector<MispredictionRecord> CollectMispredictions(
    const MappingModel& model, std::span<const InstanceIndex> instances,
    std::span<const ClassIndex> seen_classes, const Dataset& dataset,
    const Matrix& signatures, const Vector& attribute_weights) {
  std::vector<MispredictionRecord> records;
  if (instances.empty()) return records;

  Matrix x(static_cast<Eigen::Index>(instances.size()), dataset.features.cols());
  for (std::size_t r = 0; r < instances.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) =
        dataset.features.row(static_cast<Eigen::Index>(instances[r]));
  }
  const Matrix mapped = ForwardBatch(model, x);
  const std::vector<ClassIndex> predicted =
      PredictMapped(mapped, seen_classes, signatures, attribute_weights);

  for (std::size_t r = 0; r < instances.size(); ++r) {
    const ClassIndex truth = dataset.labels[instances[r]];
    if (predicted[r] == truth) continue;
    MispredictionRecord record;
    record.instance = instances[r];
    record.true_class = truth;
    record.predicted_class = predicted[r];
    record.mapped = mapped.row(static_cast<Eigen::Index>(r)).transpose();
    const Vector z_true =
        signatures.row(static_cast<Eigen::Index>(truth)).transpose().cwiseProduct(
            attribute_weights);
    const Vector z_pred = signatures.row(static_cast<Eigen::Index>(predicted[r]))
                              .transpose()
                              .cwiseProduct(attribute_weights);
    record.contributions = AttributeContributions(record.mapped, z_true, z_pred);
    records.push_back(std::move(record));
  }
  return records;
}

std::string_view SideName(Side side) {
  return side == Side::kOver ? "over" : "under";
}

Side ParseSide(std::string_view name) {
  if (name == "over") return Side::kOver;
  if (name == "under") return Side::kUnder;
  throw InvalidArgument("side must be 'over' or 'under', got '" +
                        std::string(name) + "'");
}

DiagnosticsSummary::DiagnosticsSummary(std::size_t num_attributes,
                                       std::vector<ClassIndex> selected,
                                       std::vector<std::size_t> counts)
    : selected_(std::move(selected)), counts_(std::move(counts)) {
  if (counts_.size() != selected_.size()) {
    throw InvalidArgument("counts must align with selected categories");
  }
  const auto a = static_cast<Eigen::Index>(num_attributes);
  const auto cols = static_cast<Eigen::Index>(selected_.size());
  q_over_ = Matrix::Zero(a, cols);
  q_under_ = Matrix::Zero(a, cols);
  breakdown_.resize(2 * num_attributes * selected_.size());
}

std::size_t DiagnosticsSummary::ColumnOf(ClassIndex category) const {
  const auto it = std::find(selected_.begin(), selected_.end(), category);
  if (it == selected_.end()) {
    throw InvalidArgument("category " + std::to_string(category) +
                          " is not selected");
  }
  return static_cast<std::size_t>(it - selected_.begin());
}

std::size_t DiagnosticsSummary::CellIndex(AttributeIndex attribute,
                                          std::size_t column,
                                          Side side) const {
  if (attribute >= num_attributes() || column >= selected_.size()) {
    throw InvalidArgument("diagnostics cell (" + std::to_string(attribute) +
                          ", " + std::to_string(column) + ") out of range");
  }
  const std::size_t plane = side == Side::kOver ? 0 : 1;
  return (plane * num_attributes() + attribute) * selected_.size() + column;
}

const std::map<ClassIndex, double>& DiagnosticsSummary::Breakdown(
    AttributeIndex attribute, std::size_t column, Side side) const {
  return breakdown_[CellIndex(attribute, column, side)];
}

void DiagnosticsSummary::Add(AttributeIndex attribute, std::size_t column,
                             Side side, ClassIndex predicted_class,
                             double amount) {
  const std::size_t cell = CellIndex(attribute, column, side);
  Matrix& q = side == Side::kOver ? q_over_ : q_under_;
  q(static_cast<Eigen::Index>(attribute), static_cast<Eigen::Index>(column)) +=
      amount;
  breakdown_[cell][predicted_class] += amount;
}

DiagnosticsSummary AggregateScores(
    std::span<const MispredictionRecord> records,
    std::span<const ClassIndex> selected_categories,
    std::span<const std::size_t> class_counts, std::size_t num_attributes) {
  std::vector<std::size_t> counts;
  std::vector<long> column_of(class_counts.size(), -1);
  for (std::size_t j = 0; j < selected_categories.size(); ++j) {
    const ClassIndex c = selected_categories[j];
    if (c >= class_counts.size()) {
      throw InvalidArgument("selected category " + std::to_string(c) +
                            " out of range");
    }
    if (class_counts[c] == 0) {
      throw InvalidArgument("selected category " + std::to_string(c) +
                            " has no holdout instances");
    }
    if (column_of[c] >= 0) {
      throw InvalidArgument("category " + std::to_string(c) +
                            " selected twice");
    }
    column_of[c] = static_cast<long>(j);
    counts.push_back(class_counts[c]);
  }
  DiagnosticsSummary summary(
      num_attributes,
      std::vector<ClassIndex>(selected_categories.begin(),
                              selected_categories.end()),
      counts);

  for (const MispredictionRecord& record : records) {
    if (record.true_class >= column_of.size() ||
        column_of[record.true_class] < 0) {
      continue;
    }
    if (static_cast<std::size_t>(record.contributions.size()) !=
        num_attributes) {
      throw InvalidArgument("record width != number of attributes");
    }
    const auto column = static_cast<std::size_t>(column_of[record.true_class]);
    const double scale = 1.0 / static_cast<double>(counts[column]);
    for (Eigen::Index k = 0; k < record.contributions.size(); ++k) {
      const double p = record.contributions(k);
      if (!(p > 0.0)) continue;
      const double f = record.mapped(k);
      if (f == 0.0) continue;
      summary.Add(static_cast<AttributeIndex>(k), column,
                  f > 0.0 ? Side::kOver : Side::kUnder,
                  record.predicted_class, p * scale);
    }
  }
  return summary;
}

std::string_view SortKeyName(SortKey key) {
  switch (key) {
    case SortKey::kUnder:
      return "under";
    case SortKey::kOver:
      return "over";
    case SortKey::kTotal:
      return "total";
    case SortKey::kUnseenSum:
      return "unseen_sum";
  }
  return "total";
}

SortKey ParseSortKey(std::string_view name) {
  if (name == "under") return SortKey::kUnder;
  if (name == "over") return SortKey::kOver;
  if (name == "total") return SortKey::kTotal;
  if (name == "unseen_sum") return SortKey::kUnseenSum;
  throw InvalidArgument("unknown sort key '" + std::string(name) + "'");
}

namespace {

AttributeOrdering DescendingOrder(SortKey key, const Vector& values) {
  AttributeOrdering ordering;
  ordering.key = key;
  ordering.order.resize(static_cast<std::size_t>(values.size()));
  std::iota(ordering.order.begin(), ordering.order.end(), 0);
  std::stable_sort(ordering.order.begin(), ordering.order.end(),
                   [&](AttributeIndex lhs, AttributeIndex rhs) {
                     return values(static_cast<Eigen::Index>(lhs)) >
                            values(static_cast<Eigen::Index>(rhs));
                   });
  return ordering;
}

}  // namespace

AttributeOrdering SortAttributes(const DiagnosticsSummary& summary,
                                 SortKey key) {
  switch (key) {
    case SortKey::kUnder:
      return DescendingOrder(key, summary.q_under().rowwise().sum());
    case SortKey::kOver:
      return DescendingOrder(key, summary.q_over().rowwise().sum());
    case SortKey::kTotal:
      return DescendingOrder(key, summary.q_under().rowwise().sum() +
                                      summary.q_over().rowwise().sum());
    case SortKey::kUnseenSum:
      break;
  }
  throw InvalidArgument("sorting by unseen_sum needs unseen signatures");
}

AttributeOrdering SortAttributes(const DiagnosticsSummary& summary,
                                 SortKey key,
                                 const Matrix& unseen_signatures) {
  if (key != SortKey::kUnseenSum) return SortAttributes(summary, key);
  if (unseen_signatures.rows() == 0) {
    throw InvalidArgument("sorting by unseen_sum needs an unseen selection");
  }
  if (static_cast<std::size_t>(unseen_signatures.cols()) !=
      summary.num_attributes()) {
    throw InvalidArgument("unseen signature width != number of attributes");
  }
  return DescendingOrder(key, unseen_signatures.colwise().sum().transpose());
}

std::vector<ClassIndex> StackingOrder(const DiagnosticsSummary& summary,
                                      StackBasis basis) {
  Vector totals;
  switch (basis) {
    case StackBasis::kOver:
      totals = summary.q_over().colwise().sum().transpose();
      break;
    case StackBasis::kUnder:
      totals = summary.q_under().colwise().sum().transpose();
      break;
    case StackBasis::kTotal:
      totals = (summary.q_over() + summary.q_under()).colwise().sum().transpose();
      break;
  }
  const auto& selected = summary.selected_categories();
  std::vector<std::size_t> columns(selected.size());
  std::iota(columns.begin(), columns.end(), 0);
  std::sort(columns.begin(), columns.end(),
            [&](std::size_t lhs, std::size_t rhs) {
              const double tl = totals(static_cast<Eigen::Index>(lhs));
              const double tr = totals(static_cast<Eigen::Index>(rhs));
              if (tl != tr) return tl > tr;
              return selected[lhs] < selected[rhs];
            });
  std::vector<ClassIndex> order;
  order.reserve(columns.size());
  for (std::size_t j : columns) order.push_back(selected[j]);
  return order;
}

}  // namespace zslscope
