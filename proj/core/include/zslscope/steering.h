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

#ifndef ZSLSCOPE_STEERING_H_
#define ZSLSCOPE_STEERING_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zslscope/dataset.h"
#include "zslscope/diagnostics.h"
#include "zslscope/model.h"
#include "zslscope/types.h"

namespace zslscope {

// Decrement applied per click on an attribute bar.
inline constexpr double kClickDelta = -0.1;
// Weights below this are allowed but usually hurt accuracy.
inline constexpr double kSuggestedMinWeight = 0.5;

struct WeightChange {
  AttributeIndex attribute = 0;
  double old_value = 1.0;
  double new_value = 1.0;
  std::chrono::system_clock::time_point timestamp;
};

// Attribute weights w in [0, 1]^a (the diagonal of D) plus the edit log that
// produced them. Immutable; every edit returns a new state.
class SteeringState {
 public:
  static SteeringState Initial(std::size_t num_attributes);

  // A state whose history sets each attribute differing from 1 directly.
  static SteeringState FromWeights(const Vector& weights);

  const Vector& weights() const { return weights_; }
  std::uint64_t revision() const { return revision_; }
  const std::vector<WeightChange>& history() const { return history_; }
  std::size_t num_attributes() const {
    return static_cast<std::size_t>(weights_.size());
  }

  // Applies the history to an all-ones vector.
  Vector ReplayHistory() const;

  SteeringState Adjusted(AttributeIndex attribute, double delta) const;

 private:
  SteeringState() = default;

  Vector weights_;
  std::uint64_t revision_ = 0;
  std::vector<WeightChange> history_;
};

// clamp(w_k + delta, 0, 1); revision advances even when nothing changes.
SteeringState AdjustWeight(const SteeringState& state,
                           AttributeIndex attribute, double delta);

bool BelowSuggestedRange(double weight);

struct RetrainResult {
  MappingModel model;
  TrainReport report;
  DiagnosticsSummary diagnostics;  // all seen classes, holdout split
};

// Cold-start training under the state's weights with config.seed, followed
// by fresh diagnostics for the new model under the same weights.
RetrainResult Retrain(const Dataset& dataset, const Split& split,
                      const Matrix& signatures, const SteeringState& state,
                      const TrainConfig& config);

enum class JobStatus { kPending, kRunning, kDone, kFailed };

std::string_view JobStatusName(JobStatus status);

struct RetrainJob {
  std::uint64_t id = 0;
  JobStatus status = JobStatus::kPending;
  std::uint64_t base_revision = 0;
  std::optional<Metrics> metrics_before;
  std::optional<Metrics> metrics_after;
  std::optional<Metrics> unseen_before;
  std::optional<Metrics> unseen_after;
  std::optional<std::string> error;

  // pending -> running -> (done | failed); throws InvalidArgument otherwise.
  void TransitionTo(JobStatus next);
  bool finished() const {
    return status == JobStatus::kDone || status == JobStatus::kFailed;
  }
};

}  // namespace zslscope

#endif  // ZSLSCOPE_STEERING_H_
