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

#ifndef ZSLSCOPE_JSON_IO_H_
#define ZSLSCOPE_JSON_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zslscope/dataset.h"
#include "zslscope/diagnostics.h"
#include "zslscope/model.h"
#include "zslscope/steering.h"
#include "zslscope/tsne.h"

namespace zslscope {

nlohmann::json MatrixToJson(const Matrix& m);
nlohmann::json VectorToJson(const Vector& v);
Vector VectorFromJson(const nlohmann::json& j);

nlohmann::json TrainConfigToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

nlohmann::json MetricsToJson(const Metrics& metrics,
                             std::span<const std::string> class_names);

nlohmann::json JobToJson(const RetrainJob& job,
                         std::span<const std::string> class_names);

// Diagnostics export: {attributes, categories, q_over, q_under, fp_breakdown,
// counts, orderings}. Matrix rows are attributes. fp_breakdown.over[k][j] maps
// predicted class name -> contribution for attribute k, category j.
// `unseen_signatures` (one row per selected unseen class) adds the
// unseen_sum ordering when non-empty.
nlohmann::json DiagnosticsToJson(const DiagnosticsSummary& summary,
                                 const Dataset& dataset,
                                 const Matrix& unseen_signatures);

// {"classes": [...], "seen": [...], "coords": [[x, y], ...], "kl": final}
nlohmann::json ProjectionToJson(const ProjectionResult& projection,
                                std::span<const std::string> class_names);

// Weights file: {"weights": [a reals in 0..1]}.
Vector LoadWeightsFile(const std::filesystem::path& path,
                       std::size_t num_attributes);
void SaveWeightsFile(const Vector& weights, const std::filesystem::path& path);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace zslscope

#endif  // ZSLSCOPE_JSON_IO_H_
