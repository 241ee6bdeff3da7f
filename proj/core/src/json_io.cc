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

#include "zslscope/json_io.h"

#include <fstream>

#include "file_util.h"
#include "zslscope/errors.h"

namespace zslscope {

using nlohmann::json;

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json VectorToJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vector VectorFromJson(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a JSON array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw InvalidArgument("expected a number");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

json TrainConfigToJson(const TrainConfig& config) {
  return {{"margin", config.margin},
          {"learning_rate", config.learning_rate},
          {"momentum", config.momentum},
          {"batch_size", config.batch_size},
          {"epochs", config.epochs},
          {"weight_decay", config.weight_decay},
          {"hidden_dim", config.hidden_dim},
          {"seed", config.seed}};
}

TrainConfig TrainConfigFromJson(const json& j) {
  TrainConfig config;
  config.margin = j.at("margin").get<double>();
  config.learning_rate = j.at("learning_rate").get<double>();
  config.momentum = j.at("momentum").get<double>();
  config.batch_size = j.at("batch_size").get<std::size_t>();
  config.epochs = j.at("epochs").get<int>();
  config.weight_decay = j.at("weight_decay").get<double>();
  config.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

json MetricsToJson(const Metrics& metrics,
                   std::span<const std::string> class_names) {
  json per_class = json::array();
  for (const auto& [c, entry] : metrics.per_class) {
    per_class.push_back({{"index", c},
                         {"class", class_names[c]},
                         {"correct", entry.correct},
                         {"total", entry.total},
                         {"accuracy", entry.accuracy()}});
  }
  return {{"overall_accuracy", metrics.overall_accuracy},
          {"mean_per_class_accuracy", metrics.mean_per_class_accuracy},
          {"correct", metrics.correct},
          {"total", metrics.total},
          {"per_class", std::move(per_class)}};
}

json JobToJson(const RetrainJob& job, std::span<const std::string> class_names) {
  const auto optional_metrics = [&](const std::optional<Metrics>& m) -> json {
    return m ? MetricsToJson(*m, class_names) : json(nullptr);
  };
  json out = {{"id", job.id},
              {"status", JobStatusName(job.status)},
              {"base_revision", job.base_revision},
              {"metrics_before", optional_metrics(job.metrics_before)},
              {"metrics_after", optional_metrics(job.metrics_after)},
              {"error", job.error ? json(*job.error) : json(nullptr)}};
  if (job.unseen_before || job.unseen_after) {
    out["unseen_before"] = optional_metrics(job.unseen_before);
    out["unseen_after"] = optional_metrics(job.unseen_after);
  }
  return out;
}

namespace {

json OrderToJson(const AttributeOrdering& ordering) {
  return json(ordering.order);
}

}  // namespace

json DiagnosticsToJson(const DiagnosticsSummary& summary,
                       const Dataset& dataset,
                       const Matrix& unseen_signatures) {
  json categories = json::array();
  for (ClassIndex c : summary.selected_categories()) {
    categories.push_back(dataset.class_names.at(c));
  }
  json breakdown = json::object();
  for (Side side : {Side::kOver, Side::kUnder}) {
    json rows = json::array();
    for (AttributeIndex k = 0; k < summary.num_attributes(); ++k) {
      json row = json::array();
      for (std::size_t j = 0; j < summary.selected_categories().size(); ++j) {
        json cell = json::object();
        for (const auto& [predicted, value] : summary.Breakdown(k, j, side)) {
          cell[dataset.class_names.at(predicted)] = value;
        }
        row.push_back(std::move(cell));
      }
      rows.push_back(std::move(row));
    }
    breakdown[std::string(SideName(side))] = std::move(rows);
  }
  json orderings = {
      {"under", OrderToJson(SortAttributes(summary, SortKey::kUnder))},
      {"over", OrderToJson(SortAttributes(summary, SortKey::kOver))},
      {"total", OrderToJson(SortAttributes(summary, SortKey::kTotal))}};
  if (unseen_signatures.rows() > 0) {
    orderings["unseen_sum"] = OrderToJson(
        SortAttributes(summary, SortKey::kUnseenSum, unseen_signatures));
  }
  return {{"attributes", dataset.attribute_names},
          {"categories", std::move(categories)},
          {"q_over", MatrixToJson(summary.q_over())},
          {"q_under", MatrixToJson(summary.q_under())},
          {"fp_breakdown", std::move(breakdown)},
          {"counts", summary.counts()},
          {"orderings", std::move(orderings)}};
}

json ProjectionToJson(const ProjectionResult& projection,
                      std::span<const std::string> class_names) {
  json coords = json::array();
  for (Eigen::Index i = 0; i < projection.coords.rows(); ++i) {
    coords.push_back({projection.coords(i, 0), projection.coords(i, 1)});
  }
  json seen = json::array();
  for (bool s : projection.seen_mask) seen.push_back(s);
  return {{"classes", std::vector<std::string>(class_names.begin(),
                                               class_names.end())},
          {"seen", std::move(seen)},
          {"coords", std::move(coords)},
          {"kl", projection.kl_history.empty()
                     ? json(nullptr)
                     : json(projection.kl_history.back())}};
}

Vector LoadWeightsFile(const std::filesystem::path& path,
                       std::size_t num_attributes) {
  const json j = ReadJsonFile(path);
  try {
    Vector w = VectorFromJson(j.at("weights"));
    ValidateAttributeWeights(w, num_attributes);
    return w;
  } catch (const json::exception& e) {
    throw DataError(path, 0, e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(path, 0, e.what());
  }
}

void SaveWeightsFile(const Vector& weights, const std::filesystem::path& path) {
  WriteJsonFile({{"weights", VectorToJson(weights)}}, path);
}

json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = internal::ReadFileBytes(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(path, 0, e.what());
  }
}

void WriteJsonFile(const json& j, const std::filesystem::path& path) {
  internal::WriteFileBytes(path, j.dump(2) + "\n");
}

}  // namespace zslscope
