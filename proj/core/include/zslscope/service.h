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

#ifndef ZSLSCOPE_SERVICE_H_
#define ZSLSCOPE_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "zslscope/dataset.h"
#include "zslscope/model.h"
#include "zslscope/tsne.h"

namespace zslscope {

struct ServiceOptions {
  TsneConfig tsne;
  // Directory served at "/" (the UI bundle). Empty disables static serving.
  std::filesystem::path static_dir;
  // Experimental: report accuracy on unseen-class instances in retrain
  // results and /api/metrics. Never used for training or diagnostics.
  bool evaluate_unseen = false;
};

// Everything a session needs. `model_weights` are the attribute weights the
// model was trained under; steering starts from them.
struct SessionData {
  Dataset dataset;
  Split split;
  SignatureMatrix signatures;
  MappingModel model;
  Vector model_weights;
  TrainConfig train_config;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Single-session analytics service. Handle() is the transport-independent
// router; Start() exposes it over HTTP. Reads may run concurrently; weight
// edits and model swaps are serialized, and at most one retrain runs at a
// time.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Until this is called every API endpoint answers 503.
  void Load(SessionData data);
  bool ready() const;

  ApiResponse Handle(std::string_view method, std::string_view path,
                     const std::map<std::string, std::string>& query,
                     std::string_view body);

  // Binds and serves on a background thread; returns the bound port (pass
  // port 0 for an ephemeral one). Throws Error if binding fails.
  int Start(const std::string& host, int port);
  // Blocks serving on the calling thread.
  void Listen(const std::string& host, int port);
  void Stop();

  // Blocks until the given retrain job has finished. Returns false for an
  // unknown id.
  bool WaitForJob(std::uint64_t id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace zslscope

#endif  // ZSLSCOPE_SERVICE_H_
