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

#include "zslscope/steering.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "zslscope/errors.h"

namespace zslscope {

SteeringState SteeringState::Initial(std::size_t num_attributes) {
  if (num_attributes == 0) throw InvalidArgument("no attributes to steer");
  SteeringState state;
  state.weights_ = UnitWeights(num_attributes);
  return state;
}

SteeringState SteeringState::FromWeights(const Vector& weights) {
  ValidateAttributeWeights(weights, static_cast<std::size_t>(weights.size()));
  SteeringState state = Initial(static_cast<std::size_t>(weights.size()));
  const auto now = std::chrono::system_clock::now();
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights(k) == 1.0) continue;
    state.history_.push_back(
        {static_cast<AttributeIndex>(k), 1.0, weights(k), now});
    state.weights_(k) = weights(k);
    ++state.revision_;
  }
  return state;
}

Vector SteeringState::ReplayHistory() const {
  Vector replayed = UnitWeights(num_attributes());
  for (const WeightChange& change : history_) {
    replayed(static_cast<Eigen::Index>(change.attribute)) = change.new_value;
  }
  return replayed;
}

SteeringState SteeringState::Adjusted(AttributeIndex attribute,
                                      double delta) const {
  if (attribute >= num_attributes()) {
    throw InvalidArgument("attribute index " + std::to_string(attribute) +
                          " out of range (have " +
                          std::to_string(num_attributes()) + ")");
  }
  if (!std::isfinite(delta)) throw InvalidArgument("delta must be finite");
  SteeringState next = *this;
  const auto k = static_cast<Eigen::Index>(attribute);
  const double old_value = weights_(k);
  const double new_value = std::clamp(old_value + delta, 0.0, 1.0);
  next.weights_(k) = new_value;
  next.revision_ = revision_ + 1;
  next.history_.push_back(
      {attribute, old_value, new_value, std::chrono::system_clock::now()});
  return next;
}

SteeringState AdjustWeight(const SteeringState& state,
                           AttributeIndex attribute, double delta) {
  return state.Adjusted(attribute, delta);
}

bool BelowSuggestedRange(double weight) { return weight < kSuggestedMinWeight; }

RetrainResult Retrain(const Dataset& dataset, const Split& split,
                      const Matrix& signatures, const SteeringState& state,
                      const TrainConfig& config) {
  TrainResult trained =
      Train(dataset, split, signatures, state.weights(), config);
  const std::vector<MispredictionRecord> records =
      CollectMispredictions(trained.model, split.diag_instances,
                            split.seen_classes, dataset, signatures,
                            state.weights());
  const std::vector<std::size_t> counts =
      CountPerClass(dataset, split.diag_instances);
  std::vector<ClassIndex> selected;
  for (ClassIndex c : split.seen_classes) {
    if (counts[c] > 0) selected.push_back(c);
  }
  DiagnosticsSummary diagnostics = AggregateScores(
      records, selected, counts, dataset.num_attributes());
  return {std::move(trained.model), std::move(trained.report),
          std::move(diagnostics)};
}

std::string_view JobStatusName(JobStatus status) {
  switch (status) {
    case JobStatus::kPending:
      return "pending";
    case JobStatus::kRunning:
      return "running";
    case JobStatus::kDone:
      return "done";
    case JobStatus::kFailed:
      return "failed";
  }
  return "failed";
}

void RetrainJob::TransitionTo(JobStatus next) {
  const bool allowed =
      (status == JobStatus::kPending && next == JobStatus::kRunning) ||
      (status == JobStatus::kRunning &&
       (next == JobStatus::kDone || next == JobStatus::kFailed));
  if (!allowed) {
    throw InvalidArgument("illegal job transition " +
                          std::string(JobStatusName(status)) + " -> " +
                          std::string(JobStatusName(next)));
  }
  status = next;
}

}  // namespace zslscope
