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

#include "zslscope/service.h"

#include <algorithm>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "file_util.h"
#include "zslscope/diagnostics.h"
#include "zslscope/errors.h"
#include "zslscope/json_io.h"
#include "zslscope/steering.h"

namespace zslscope {
namespace {

using nlohmann::json;

// An error that maps directly onto an HTTP status.
struct ApiError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse ErrorResponse(int status, const std::string& code,
                          const std::string& message) {
  return {status, json{{"error", message}, {"code", code}}};
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  for (std::string& item : internal::SplitCsvLine(text)) {
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

std::string QueryValue(const std::map<std::string, std::string>& query,
                       const std::string& key, const std::string& fallback) {
  const auto it = query.find(key);
  return it == query.end() ? fallback : it->second;
}

std::size_t ParseIndexParam(const std::map<std::string, std::string>& query,
                            const std::string& key) {
  const auto it = query.find(key);
  if (it == query.end()) {
    throw ApiError{400, "missing_parameter", "missing parameter '" + key + "'"};
  }
  std::size_t value = 0;
  if (!internal::ParseSize(it->second, value)) {
    throw ApiError{400, "invalid_parameter",
                   "parameter '" + key + "' must be a non-negative integer"};
  }
  return value;
}

json ClassList(const Dataset& dataset, std::span<const ClassIndex> classes) {
  json out = json::array();
  for (ClassIndex c : classes) {
    out.push_back({{"index", c}, {"name", dataset.class_names[c]}});
  }
  return out;
}

}  // namespace

struct Service::Impl {
  // Consistent view of the mutable session state.
  struct Snapshot {
    std::shared_ptr<const SessionData> data;
    std::shared_ptr<const MappingModel> model;
    Vector model_weights;
    SteeringState steering = SteeringState::Initial(1);
    std::uint64_t model_revision = 0;
    std::vector<std::size_t> diag_counts;
  };

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {}

  ~Impl() {
    if (worker.joinable()) worker.join();
  }

  ServiceOptions options;

  // Writers (load, weight edits, model swap) take `mu` exclusively.
  mutable std::shared_mutex mu;
  bool loaded = false;
  Snapshot state;

  std::mutex cache_mu;
  std::optional<ProjectionResult> projection;
  std::uint64_t records_model_revision = 0;
  std::uint64_t records_weight_revision = 0;
  std::optional<std::vector<MispredictionRecord>> records;

  std::mutex jobs_mu;
  std::condition_variable jobs_cv;
  std::map<std::uint64_t, RetrainJob> jobs;
  std::uint64_t next_job_id = 1;
  bool job_active = false;
  std::thread worker;

  httplib::Server server;
  std::thread server_thread;

  Snapshot Read() const {
    std::shared_lock lock(mu);
    if (!loaded) {
      throw ApiError{503, "not_ready", "no dataset and model loaded yet"};
    }
    return state;
  }

  json Revisions(const Snapshot& s) const {
    return {{"revision", s.steering.revision()},
            {"model_revision", s.model_revision}};
  }

  const ProjectionResult& Projection(const Snapshot& s) {
    std::lock_guard lock(cache_mu);
    if (!projection) {
      ProjectionResult result =
          Project(s.data->signatures.signatures, options.tsne);
      result.seen_mask.resize(s.data->dataset.num_classes());
      for (ClassIndex c = 0; c < s.data->dataset.num_classes(); ++c) {
        result.seen_mask[c] = s.data->split.IsSeen(c);
      }
      projection = std::move(result);
    }
    return *projection;
  }

  std::vector<MispredictionRecord> Records(const Snapshot& s) {
    std::lock_guard lock(cache_mu);
    if (!records || records_model_revision != s.model_revision ||
        records_weight_revision != s.steering.revision()) {
      records = CollectMispredictions(
          *s.model, s.data->split.diag_instances, s.data->split.seen_classes,
          s.data->dataset, s.data->signatures.signatures,
          s.steering.weights());
      records_model_revision = s.model_revision;
      records_weight_revision = s.steering.revision();
    }
    return *records;
  }

  std::vector<ClassIndex> ResolveClasses(const Snapshot& s,
                                         const std::string& list,
                                         bool want_seen) {
    std::vector<ClassIndex> out;
    for (const std::string& name : SplitList(list)) {
      const std::optional<ClassIndex> c = s.data->dataset.FindClass(name);
      if (!c) {
        throw ApiError{400, "unknown_class", "unknown class '" + name + "'"};
      }
      if (s.data->split.IsSeen(*c) != want_seen) {
        throw ApiError{400, "wrong_partition",
                       "class '" + name + "' is not " +
                           (want_seen ? "seen" : "unseen")};
      }
      if (std::find(out.begin(), out.end(), *c) == out.end()) {
        out.push_back(*c);
      }
    }
    return out;
  }

  ApiResponse Overview() {
    const Snapshot s = Read();
    const ProjectionResult& p = Projection(s);
    const Dataset& dataset = s.data->dataset;
    json categories = json::array();
    for (ClassIndex c = 0; c < dataset.num_classes(); ++c) {
      const auto row = static_cast<Eigen::Index>(c);
      categories.push_back({{"index", c},
                            {"name", dataset.class_names[c]},
                            {"seen", s.data->split.IsSeen(c)},
                            {"x", p.coords(row, 0)},
                            {"y", p.coords(row, 1)},
                            {"diag_count", s.diag_counts[c]}});
    }
    json body = Revisions(s);
    body["categories"] = std::move(categories);
    body["attributes"] = dataset.attribute_names;
    body["kl"] = p.kl_history.back();
    return {200, std::move(body)};
  }

  ApiResponse Diagnostics(const std::map<std::string, std::string>& query) {
    const Snapshot s = Read();
    const Dataset& dataset = s.data->dataset;
    const std::vector<ClassIndex> seen =
        ResolveClasses(s, QueryValue(query, "seen", ""), true);
    const std::vector<ClassIndex> unseen =
        ResolveClasses(s, QueryValue(query, "unseen", ""), false);
    const SortKey key = ParseSortKey(QueryValue(query, "sort", "total"));
    if (key == SortKey::kUnseenSum && unseen.empty()) {
      throw ApiError{400, "invalid_sort",
                     "sort=unseen_sum needs at least one unseen class"};
    }
    for (ClassIndex c : seen) {
      if (s.diag_counts[c] == 0) {
        throw ApiError{400, "no_holdout",
                       "class '" + dataset.class_names[c] +
                           "' has no holdout instances"};
      }
    }

    const std::vector<MispredictionRecord> recs = Records(s);
    const DiagnosticsSummary summary = AggregateScores(
        recs, seen, s.diag_counts, dataset.num_attributes());
    Matrix unseen_rows(static_cast<Eigen::Index>(unseen.size()),
                       static_cast<Eigen::Index>(dataset.num_attributes()));
    for (std::size_t r = 0; r < unseen.size(); ++r) {
      unseen_rows.row(static_cast<Eigen::Index>(r)) =
          s.data->signatures.signatures.row(
              static_cast<Eigen::Index>(unseen[r]));
    }
    const AttributeOrdering ordering =
        SortAttributes(summary, key, unseen_rows);

    json body = Revisions(s);
    body["attributes"] = dataset.attribute_names;
    body["selected_seen"] = ClassList(dataset, seen);
    body["selected_unseen"] = ClassList(dataset, unseen);
    body["q_over"] = MatrixToJson(summary.q_over());
    body["q_under"] = MatrixToJson(summary.q_under());
    body["counts"] = summary.counts();
    body["stacking"] = {
        {"over", StackingOrder(summary, StackBasis::kOver)},
        {"under", StackingOrder(summary, StackBasis::kUnder)},
        {"total", StackingOrder(summary, StackBasis::kTotal)}};
    body["ordering"] = {{"key", SortKeyName(key)}, {"order", ordering.order}};
    body["unseen_signatures"] = MatrixToJson(unseen_rows);
    body["weights"] = VectorToJson(s.steering.weights());
    return {200, std::move(body)};
  }

  ApiResponse Decomposition(const std::map<std::string, std::string>& query) {
    const Snapshot s = Read();
    const Dataset& dataset = s.data->dataset;
    const AttributeIndex attribute = ParseIndexParam(query, "attr");
    if (attribute >= dataset.num_attributes()) {
      throw ApiError{400, "invalid_cell", "attribute index out of range"};
    }
    const std::string cat = QueryValue(query, "cat", "");
    std::size_t category = 0;
    if (!internal::ParseSize(cat, category)) {
      const std::optional<ClassIndex> named = dataset.FindClass(cat);
      if (!named) {
        throw ApiError{400, "invalid_cell", "unknown category '" + cat + "'"};
      }
      category = *named;
    }
    if (category >= dataset.num_classes() || !s.data->split.IsSeen(category) ||
        s.diag_counts[category] == 0) {
      throw ApiError{400, "invalid_cell",
                     "category must be a seen class with holdout instances"};
    }
    const Side side = ParseSide(QueryValue(query, "side", ""));

    const std::vector<MispredictionRecord> recs = Records(s);
    const std::vector<ClassIndex> selected = {category};
    const DiagnosticsSummary summary = AggregateScores(
        recs, selected, s.diag_counts, dataset.num_attributes());

    std::vector<std::pair<ClassIndex, double>> entries(
        summary.Breakdown(attribute, 0, side).begin(),
        summary.Breakdown(attribute, 0, side).end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& lhs, const auto& rhs) {
                       return lhs.second > rhs.second;
                     });
    json rows = json::array();
    for (const auto& [predicted, value] : entries) {
      rows.push_back({{"index", predicted},
                      {"name", dataset.class_names[predicted]},
                      {"value", value}});
    }
    json body = Revisions(s);
    body["attribute"] = attribute;
    body["category"] = category;
    body["side"] = SideName(side);
    body["total"] = summary.q(side)(static_cast<Eigen::Index>(attribute), 0);
    body["entries"] = std::move(rows);
    return {200, std::move(body)};
  }

  json WeightsBody(const Snapshot& s) const {
    json body = Revisions(s);
    body["weights"] = VectorToJson(s.steering.weights());
    json low = json::array();
    for (Eigen::Index k = 0; k < s.steering.weights().size(); ++k) {
      if (BelowSuggestedRange(s.steering.weights()(k))) low.push_back(k);
    }
    body["below_suggested"] = std::move(low);
    body["suggested_min"] = kSuggestedMinWeight;
    return body;
  }

  ApiResponse GetWeights() { return {200, WeightsBody(Read())}; }

  ApiResponse PostWeight(std::string_view body_text) {
    json request;
    try {
      request = json::parse(body_text);
    } catch (const json::exception&) {
      throw ApiError{400, "bad_json", "request body is not valid JSON"};
    }
    if (!request.is_object() || !request.contains("attr") ||
        !request["attr"].is_number_integer()) {
      throw ApiError{400, "invalid_parameter",
                     "body must be {\"attr\": index, \"delta\": real}"};
    }
    const auto attr = request["attr"].get<long long>();
    double delta = kClickDelta;
    if (request.contains("delta")) {
      if (!request["delta"].is_number()) {
        throw ApiError{400, "invalid_parameter", "delta must be a number"};
      }
      delta = request["delta"].get<double>();
    }
    Snapshot s;
    {
      std::unique_lock lock(mu);
      if (!loaded) {
        throw ApiError{503, "not_ready", "no dataset and model loaded yet"};
      }
      if (attr < 0 ||
          static_cast<std::size_t>(attr) >= state.steering.num_attributes()) {
        throw ApiError{400, "invalid_attribute",
                       "attribute index out of range"};
      }
      state.steering =
          AdjustWeight(state.steering, static_cast<AttributeIndex>(attr), delta);
      s = state;
    }
    json body = WeightsBody(s);
    const double weight = s.steering.weights()(static_cast<Eigen::Index>(attr));
    body["attribute"] = attr;
    body["weight"] = weight;
    if (BelowSuggestedRange(weight)) {
      body["warning"] =
          "weights below 0.5 often reduce accuracy; 0.5-0.7 usually works";
    }
    return {200, std::move(body)};
  }

  json MetricsBody(const Snapshot& s) const {
    const SessionData& d = *s.data;
    json body = Revisions(s);
    body["diag"] = MetricsToJson(
        Evaluate(*s.model, d.split.diag_instances, d.split.seen_classes,
                 d.dataset, d.signatures.signatures, s.steering.weights()),
        d.dataset.class_names);
    if (options.evaluate_unseen && !d.split.unseen_classes.empty()) {
      const std::vector<InstanceIndex> unseen =
          InstancesOfClasses(d.dataset, d.split.unseen_classes);
      if (!unseen.empty()) {
        body["unseen"] = MetricsToJson(
            Evaluate(*s.model, unseen, d.split.unseen_classes, d.dataset,
                     d.signatures.signatures, s.steering.weights()),
            d.dataset.class_names);
      }
    }
    return body;
  }

  ApiResponse GetMetrics() { return {200, MetricsBody(Read())}; }

  ApiResponse PostRetrain() {
    const Snapshot s = Read();
    std::uint64_t id = 0;
    {
      std::lock_guard lock(jobs_mu);
      if (job_active) {
        throw ApiError{409, "busy", "a retrain job is already running"};
      }
      if (worker.joinable()) worker.join();
      id = next_job_id++;
      RetrainJob job;
      job.id = id;
      job.base_revision = s.steering.revision();
      jobs.emplace(id, job);
      job_active = true;
      worker = std::thread([this, id, s] { RunJob(id, s); });
    }
    return {202, json{{"job", id}, {"status", "pending"}}};
  }

  void UpdateJob(std::uint64_t id, const std::function<void(RetrainJob&)>& fn) {
    std::lock_guard lock(jobs_mu);
    fn(jobs.at(id));
  }

  void RunJob(std::uint64_t id, Snapshot s) {
    UpdateJob(id, [](RetrainJob& job) { job.TransitionTo(JobStatus::kRunning); });
    try {
      const SessionData& d = *s.data;
      const Matrix& z = d.signatures.signatures;
      const Vector& new_weights = s.steering.weights();
      const Metrics before =
          Evaluate(*s.model, d.split.diag_instances, d.split.seen_classes,
                   d.dataset, z, s.model_weights);
      RetrainResult result =
          Retrain(d.dataset, d.split, z, s.steering, d.train_config);
      const Metrics after =
          Evaluate(result.model, d.split.diag_instances, d.split.seen_classes,
                   d.dataset, z, new_weights);
      std::optional<Metrics> unseen_before, unseen_after;
      if (options.evaluate_unseen && !d.split.unseen_classes.empty()) {
        const std::vector<InstanceIndex> unseen =
            InstancesOfClasses(d.dataset, d.split.unseen_classes);
        if (!unseen.empty()) {
          unseen_before = Evaluate(*s.model, unseen, d.split.unseen_classes,
                                   d.dataset, z, s.model_weights);
          unseen_after = Evaluate(result.model, unseen, d.split.unseen_classes,
                                  d.dataset, z, new_weights);
        }
      }
      {
        std::unique_lock lock(mu);
        state.model =
            std::make_shared<const MappingModel>(std::move(result.model));
        state.model_weights = new_weights;
        ++state.model_revision;
      }
      UpdateJob(id, [&](RetrainJob& job) {
        job.metrics_before = before;
        job.metrics_after = after;
        job.unseen_before = unseen_before;
        job.unseen_after = unseen_after;
        job.TransitionTo(JobStatus::kDone);
      });
    } catch (const std::exception& e) {
      UpdateJob(id, [&](RetrainJob& job) {
        job.error = e.what();
        job.TransitionTo(JobStatus::kFailed);
      });
    }
    {
      std::lock_guard lock(jobs_mu);
      job_active = false;
    }
    jobs_cv.notify_all();
  }

  ApiResponse GetJob(std::string_view id_text) {
    const Snapshot s = Read();
    std::size_t id = 0;
    if (!internal::ParseSize(id_text, id)) {
      throw ApiError{400, "invalid_parameter", "job id must be an integer"};
    }
    std::lock_guard lock(jobs_mu);
    const auto it = jobs.find(id);
    if (it == jobs.end()) {
      throw ApiError{404, "unknown_job", "no retrain job " + std::string(id_text)};
    }
    return {200, JobToJson(it->second, s.data->dataset.class_names)};
  }

  ApiResponse Route(std::string_view method, std::string_view path,
                    const std::map<std::string, std::string>& query,
                    std::string_view body) {
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (path == "/api/overview" && get) return Overview();
    if (path == "/api/diagnostics" && get) return Diagnostics(query);
    if (path == "/api/decomposition" && get) return Decomposition(query);
    if (path == "/api/weights" && get) return GetWeights();
    if (path == "/api/weights" && post) return PostWeight(body);
    if (path == "/api/retrain" && post) return PostRetrain();
    if (path == "/api/metrics" && get) return GetMetrics();
    constexpr std::string_view kJobPrefix = "/api/retrain/";
    if (path.starts_with(kJobPrefix) && get) {
      return GetJob(path.substr(kJobPrefix.size()));
    }
    return ErrorResponse(404, "not_found",
                         "no route for " + std::string(method) + " " +
                             std::string(path));
  }
};

Service::Service(ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->options.tsne.Validate();
}

Service::~Service() { Stop(); }

void Service::Load(SessionData data) {
  data.dataset.Validate();
  ValidateAttributeWeights(data.model_weights, data.dataset.num_attributes());
  if (data.model.input_dim() != data.dataset.feature_dim() ||
      data.model.output_dim() != data.dataset.num_attributes()) {
    throw InvalidArgument("model dimensions do not match the dataset");
  }
  data.train_config.Validate();
  {
    std::lock_guard lock(impl_->jobs_mu);
    if (impl_->job_active) {
      throw InvalidArgument("cannot load a session while a retrain runs");
    }
  }
  Impl::Snapshot next;
  next.diag_counts = CountPerClass(data.dataset, data.split.diag_instances);
  next.model = std::make_shared<const MappingModel>(data.model);
  next.model_weights = data.model_weights;
  next.steering = SteeringState::FromWeights(data.model_weights);
  next.data = std::make_shared<const SessionData>(std::move(data));
  {
    std::lock_guard cache_lock(impl_->cache_mu);
    impl_->projection.reset();
    impl_->records.reset();
  }
  std::unique_lock lock(impl_->mu);
  next.model_revision = impl_->state.model_revision + 1;
  impl_->state = std::move(next);
  impl_->loaded = true;
}

bool Service::ready() const {
  std::shared_lock lock(impl_->mu);
  return impl_->loaded;
}

ApiResponse Service::Handle(std::string_view method, std::string_view path,
                            const std::map<std::string, std::string>& query,
                            std::string_view body) {
  try {
    return impl_->Route(method, path, query, body);
  } catch (const ApiError& e) {
    return ErrorResponse(e.status, e.code, e.message);
  } catch (const InvalidArgument& e) {
    return ErrorResponse(400, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

namespace {

void ForwardRequest(Service& service, const httplib::Request& req,
             httplib::Response& res) {
  std::map<std::string, std::string> query;
  for (const auto& [key, value] : req.params) query[key] = value;
  const ApiResponse response = service.Handle(req.method, req.path, query,
                                              req.body);
  res.status = response.status;
  res.set_content(response.body.dump(), "application/json");
}

}  // namespace

int Service::Start(const std::string& host, int port) {
  httplib::Server& server = impl_->server;
  const auto handler = [this](const httplib::Request& req,
                              httplib::Response& res) {
    ForwardRequest(*this, req, res);
  };
  server.Get(R"(/api/.*)", handler);
  server.Post(R"(/api/.*)", handler);
  if (!impl_->options.static_dir.empty() &&
      !server.set_mount_point("/", impl_->options.static_dir.string())) {
    throw Error("static directory '" + impl_->options.static_dir.string() +
                "' does not exist");
  }
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server_thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void Service::Listen(const std::string& host, int port) {
  Start(host, port);
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

void Service::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

bool Service::WaitForJob(std::uint64_t id) {
  std::unique_lock lock(impl_->jobs_mu);
  if (!impl_->jobs.contains(id)) return false;
  impl_->jobs_cv.wait(lock, [&] { return impl_->jobs.at(id).finished(); });
  return true;
}

}  // namespace zslscope
