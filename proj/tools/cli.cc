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


#include "cli.h"

#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zslscope/checkpoint.h"
#include "zslscope/dataset.h"
#include "zslscope/diagnostics.h"
#include "zslscope/errors.h"
#include "zslscope/json_io.h"
#include "zslscope/model.h"
#include "zslscope/service.h"
#include "zslscope/steering.h"
#include "zslscope/tsne.h"

namespace zslscope::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flag combinations that are individually well-formed but unusable together.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> SplitNames(const std::string& list) {
  std::vector<std::string> names;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    names.push_back(item.substr(first, last - first + 1));
  }
  return names;
}

struct SplitFlags {
  std::string unseen;
  double diag_fraction = kDefaultDiagFraction;
  std::optional<std::uint64_t> seed;

  void Add(CLI::App* cmd, const std::string& seed_help) {
    cmd->add_option("--unseen", unseen,
                    "Comma-separated unseen classes (default: split.json)");
    cmd->add_option("--diag-fraction", diag_fraction,
                    "Share of each seen class held out for diagnostics "
                    "(default: split.json, else 0.2)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, seed_help);
  }
};

// Resolves the split from flags, split.json and a fallback seed, in that
// order of precedence.
struct ResolvedSplit {
  Split split;
  std::uint64_t seed = 0;
};

ResolvedSplit ResolveSplit(const Dataset& dataset, const fs::path& data_dir,
                           const CLI::App& cmd, const SplitFlags& flags,
                           std::optional<std::uint64_t> fallback_seed) {
  const std::optional<SplitSpec> spec = LoadSplitSpec(data_dir);
  std::vector<std::string> unseen;
  if (cmd.count("--unseen") > 0) {
    unseen = SplitNames(flags.unseen);
  } else if (spec) {
    unseen = spec->unseen;
  } else {
    throw UsageError("--unseen is required when " +
                     (data_dir / "split.json").string() + " is absent");
  }
  double fraction = kDefaultDiagFraction;
  if (cmd.count("--diag-fraction") > 0) {
    fraction = flags.diag_fraction;
  } else if (spec) {
    fraction = spec->diag_fraction;
  }
  std::uint64_t seed = 0;
  if (flags.seed) {
    seed = *flags.seed;
  } else if (fallback_seed) {
    seed = *fallback_seed;
  } else if (spec) {
    seed = spec->seed;
  }
  return {MakeSplit(dataset, unseen, fraction, seed), seed};
}

void AddTrainFlags(CLI::App* cmd, TrainConfig& config) {
  cmd->add_option("--margin", config.margin, "Hinge margin");
  cmd->add_option("--lr", config.learning_rate, "SGD learning rate");
  cmd->add_option("--momentum", config.momentum, "SGD momentum");
  cmd->add_option("--batch-size", config.batch_size, "Mini-batch size");
  cmd->add_option("--epochs", config.epochs, "Training epochs");
  cmd->add_option("--weight-decay", config.weight_decay,
                  "L2 penalty on all parameters");
  cmd->add_option("--hidden", config.hidden_dim, "Hidden layer width");
}

// Copies the training flags the user actually passed onto `target`.
void ApplyTrainOverrides(const CLI::App& cmd, const TrainConfig& flags,
                         TrainConfig& target) {
  if (cmd.count("--margin")) target.margin = flags.margin;
  if (cmd.count("--lr")) target.learning_rate = flags.learning_rate;
  if (cmd.count("--momentum")) target.momentum = flags.momentum;
  if (cmd.count("--batch-size")) target.batch_size = flags.batch_size;
  if (cmd.count("--epochs")) target.epochs = flags.epochs;
  if (cmd.count("--weight-decay")) target.weight_decay = flags.weight_decay;
  if (cmd.count("--hidden")) target.hidden_dim = flags.hidden_dim;
}

void AddTsneFlags(CLI::App* cmd, TsneConfig& config, const std::string& prefix) {
  cmd->add_option("--" + prefix + "perplexity", config.perplexity,
                  "t-SNE perplexity (default: min(30, (N-1)/3))");
  cmd->add_option("--" + prefix + "iterations", config.iterations,
                  "t-SNE gradient steps");
  cmd->add_option("--" + prefix + "learning-rate", config.learning_rate,
                  "t-SNE learning rate");
  cmd->add_option("--" + prefix + "exaggeration", config.early_exaggeration,
                  "Early exaggeration factor");
  cmd->add_option("--" + prefix + "exaggeration-iterations",
                  config.exaggeration_iterations,
                  "Iterations with early exaggeration");
  cmd->add_option("--" + prefix + "momentum-start", config.momentum_start,
                  "Momentum before the switch");
  cmd->add_option("--" + prefix + "momentum-final", config.momentum_final,
                  "Momentum after the switch");
  cmd->add_option("--" + prefix + "momentum-switch",
                  config.momentum_switch_iteration,
                  "Iteration at which momentum switches");
}

void EmitJson(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    WriteJsonFile(j, out_path);
  }
}

void CheckModelFits(const MappingModel& model, const Dataset& dataset,
                    const fs::path& model_path) {
  if (model.input_dim() != dataset.feature_dim() ||
      model.output_dim() != dataset.num_attributes()) {
    throw UsageError(model_path.string() + ": model maps " +
                     std::to_string(model.input_dim()) + " -> " +
                     std::to_string(model.output_dim()) +
                     " but the dataset has " +
                     std::to_string(dataset.feature_dim()) + " features and " +
                     std::to_string(dataset.num_attributes()) + " attributes");
  }
}

Matrix SignatureRows(const Matrix& signatures,
                     const std::vector<ClassIndex>& classes) {
  Matrix rows(static_cast<Eigen::Index>(classes.size()), signatures.cols());
  for (std::size_t r = 0; r < classes.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) =
        signatures.row(static_cast<Eigen::Index>(classes[r]));
  }
  return rows;
}

std::vector<ClassIndex> ResolveSelection(const Dataset& dataset,
                                         const Split& split,
                                         const std::string& list,
                                         bool want_seen) {
  std::vector<ClassIndex> out;
  for (const std::string& name : SplitNames(list)) {
    const ClassIndex c = dataset.ClassByName(name);
    if (split.IsSeen(c) != want_seen) {
      throw UsageError("class '" + name + "' is not " +
                       (want_seen ? "seen" : "unseen"));
    }
    out.push_back(c);
  }
  return out;
}

json UnseenMetrics(const MappingModel& model, const Dataset& dataset,
                   const Split& split, const Matrix& signatures,
                   const Vector& weights) {
  const std::vector<InstanceIndex> unseen =
      InstancesOfClasses(dataset, split.unseen_classes);
  if (unseen.empty()) return nullptr;
  return MetricsToJson(Evaluate(model, unseen, split.unseen_classes, dataset,
                                signatures, weights),
                       dataset.class_names);
}

json WeightList(const Vector& weights) {
  json below = json::array();
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (BelowSuggestedRange(weights(k))) below.push_back(k);
  }
  return below;
}

struct Context {
  std::ostream& out;
  std::shared_ptr<spdlog::logger> log;
};

class Commands {
 public:
  explicit Commands(CLI::App& app) {
    AddSynth(app);
    AddTrain(app);
    AddEvaluate(app);
    AddDiagnose(app);
    AddProject(app);
    AddSteer(app);
    AddServe(app);
  }

  std::function<void(Context&)> selected;

 private:
  void AddSynth(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    cmd->add_option("--seen", synth_.num_seen, "Seen classes");
    cmd->add_option("--unseen", synth_.num_unseen, "Unseen classes");
    cmd->add_option("--attrs", synth_.num_attributes, "Attributes");
    cmd->add_option("--dim", synth_.feature_dim, "Feature dimension");
    cmd->add_option("--per-class", synth_.per_class, "Instances per class");
    cmd->add_option("--noise", synth_.noise_sigma, "Feature noise stddev")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--corrupt", synth_.corrupt_attribute,
                    "Attribute index to corrupt (default: none)");
    cmd->add_option("--diag-fraction", synth_diag_fraction_,
                    "Holdout fraction recorded in split.json")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", synth_.seed, "Random seed");
    cmd->add_option("--out", out_, "Output dataset directory")->required();
    cmd->callback([this] {
      selected = [this](Context& ctx) {
        const Dataset dataset = GenerateSynthetic(synth_);
        SaveDataset(dataset, out_);
        SaveSplitSpec({SyntheticUnseenNames(synth_), synth_diag_fraction_,
                       synth_.seed},
                      out_);
        ctx.log->info("wrote {} instances of {} classes to {}",
                      dataset.num_instances(), dataset.num_classes(), out_);
      };
    });
  }

  void AddTrain(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("train", "Train a mapping model");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    train_split_.Add(cmd, "Seed for the split and the model (default: "
                          "split.json seed, else 0)");
    AddTrainFlags(cmd, train_config_);
    cmd->add_option("--weights", weights_,
                    "Attribute weights file (default: all ones)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_, "Checkpoint path")->required();
    cmd->add_option("--report", report_, "Training report JSON path");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        const Dataset dataset = LoadDataset(data_);
        const ResolvedSplit resolved =
            ResolveSplit(dataset, data_, *cmd, train_split_, std::nullopt);
        const SignatureMatrix signatures =
            StandardizeSignatures(dataset.raw_attributes);
        const Vector weights =
            weights_.empty()
                ? UnitWeights(dataset.num_attributes())
                : LoadWeightsFile(weights_, dataset.num_attributes());
        TrainConfig config = train_config_;
        config.seed = resolved.seed;
        config.Validate();
        ctx.log->info("training on {} instances of {} seen classes",
                      resolved.split.train_instances.size(),
                      resolved.split.seen_classes.size());
        const TrainResult result = Train(dataset, resolved.split,
                                         signatures.signatures, weights, config);
        for (std::size_t e = 0; e < result.report.loss_history.size(); ++e) {
          ctx.log->debug("epoch {} loss {:.6f}", e + 1,
                         result.report.loss_history[e]);
        }
        SaveCheckpoint({result.model, weights, config}, out_);
        const Metrics diag = Evaluate(
            result.model, resolved.split.diag_instances,
            resolved.split.seen_classes, dataset, signatures.signatures,
            weights);
        ctx.log->info("final loss {:.6f}, holdout mean per-class accuracy {:.4f}",
                      result.report.final_loss, diag.mean_per_class_accuracy);
        if (!report_.empty()) {
          WriteJsonFile({{"loss_history", result.report.loss_history},
                         {"final_loss", result.report.final_loss},
                         {"config", TrainConfigToJson(config)},
                         {"diag", MetricsToJson(diag, dataset.class_names)}},
                        report_);
        }
      };
    });
  }

  void AddEvaluate(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("evaluate", "Report holdout and unseen accuracy");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--model", model_, "Checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    eval_split_.Add(cmd, "Split seed (default: the checkpoint's seed)");
    cmd->add_option("--weights", weights_,
                    "Attribute weights file (default: the checkpoint's)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_, "Metrics JSON path (default: stdout)");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        const Dataset dataset = LoadDataset(data_);
        const Checkpoint checkpoint = LoadCheckpoint(model_);
        CheckModelFits(checkpoint.model, dataset, model_);
        const ResolvedSplit resolved = ResolveSplit(
            dataset, data_, *cmd, eval_split_, checkpoint.config.seed);
        const Matrix z = StandardizeSignatures(dataset.raw_attributes).signatures;
        const Vector weights =
            weights_.empty()
                ? checkpoint.attribute_weights
                : LoadWeightsFile(weights_, dataset.num_attributes());
        const Split& split = resolved.split;
        json report = {
            {"diag", MetricsToJson(Evaluate(checkpoint.model,
                                            split.diag_instances,
                                            split.seen_classes, dataset, z,
                                            weights),
                                   dataset.class_names)},
            {"unseen",
             UnseenMetrics(checkpoint.model, dataset, split, z, weights)},
            {"weights", VectorToJson(weights)}};
        EmitJson(report, out_, ctx.out);
      };
    });
  }

  void AddDiagnose(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "diagnose", "Export over/under-prediction scores for the holdout");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--model", model_, "Checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    diag_split_.Add(cmd, "Split seed (default: the checkpoint's seed)");
    cmd->add_option("--weights", weights_,
                    "Attribute weights file (default: the checkpoint's)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--select-seen", select_seen_,
                    "Seen categories to aggregate (default: all seen)");
    cmd->add_option("--select-unseen", select_unseen_,
                    "Unseen categories whose signatures are exported");
    cmd->add_option("--out", out_, "Diagnostics JSON path (default: stdout)");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        const Dataset dataset = LoadDataset(data_);
        const Checkpoint checkpoint = LoadCheckpoint(model_);
        CheckModelFits(checkpoint.model, dataset, model_);
        const ResolvedSplit resolved = ResolveSplit(
            dataset, data_, *cmd, diag_split_, checkpoint.config.seed);
        const Split& split = resolved.split;
        const Matrix z = StandardizeSignatures(dataset.raw_attributes).signatures;
        const Vector weights =
            weights_.empty()
                ? checkpoint.attribute_weights
                : LoadWeightsFile(weights_, dataset.num_attributes());
        const std::vector<ClassIndex> seen =
            select_seen_.empty()
                ? split.seen_classes
                : ResolveSelection(dataset, split, select_seen_, true);
        const std::vector<ClassIndex> unseen =
            ResolveSelection(dataset, split, select_unseen_, false);
        const std::vector<MispredictionRecord> records =
            CollectMispredictions(checkpoint.model, split.diag_instances,
                                  split.seen_classes, dataset, z, weights);
        const std::vector<std::size_t> counts =
            CountPerClass(dataset, split.diag_instances);
        const DiagnosticsSummary summary =
            AggregateScores(records, seen, counts, dataset.num_attributes());
        json report = DiagnosticsToJson(summary, dataset, SignatureRows(z, unseen));
        report["mispredictions"] = records.size();
        report["holdout_size"] = split.diag_instances.size();
        report["weights"] = VectorToJson(weights);
        ctx.log->info("{} of {} holdout instances mispredicted", records.size(),
                      split.diag_instances.size());
        EmitJson(report, out_, ctx.out);
      };
    });
  }

  void AddProject(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "project", "Project class signatures to 2D with exact t-SNE");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    AddTsneFlags(cmd, tsne_, "");
    cmd->add_option("--unseen", project_unseen_,
                    "Comma-separated unseen classes (default: split.json)");
    cmd->add_option("--seed", tsne_.seed, "Random seed");
    cmd->add_option("--out", out_, "Projection JSON path (default: stdout)");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        const Dataset dataset = LoadDataset(data_);
        tsne_.Validate();
        ProjectionResult result = Project(
            StandardizeSignatures(dataset.raw_attributes).signatures, tsne_);
        std::vector<std::string> unseen;
        if (cmd->count("--unseen") > 0) {
          unseen = SplitNames(project_unseen_);
        } else if (const auto spec = LoadSplitSpec(data_)) {
          unseen = spec->unseen;
        }
        result.seen_mask.assign(dataset.num_classes(), true);
        for (const std::string& name : unseen) {
          result.seen_mask[dataset.ClassByName(name)] = false;
        }
        ctx.log->info("final KL divergence {:.6f}", result.kl_history.back());
        EmitJson(ProjectionToJson(result, dataset.class_names), out_, ctx.out);
      };
    });
  }

  void AddSteer(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "steer", "Retrain from scratch under an attribute weights file");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--model", model_, "Base checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--weights", weights_, "Attribute weights file")
        ->required()
        ->check(CLI::ExistingFile);
    steer_split_.Add(cmd, "Split and training seed (default: the "
                          "checkpoint's seed)");
    AddTrainFlags(cmd, steer_config_);
    cmd->add_option("--out", out_, "Retrained checkpoint path")->required();
    cmd->add_option("--report", report_,
                    "Before/after metrics JSON path (default: stdout)");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        const Dataset dataset = LoadDataset(data_);
        const Checkpoint base = LoadCheckpoint(model_);
        CheckModelFits(base.model, dataset, model_);
        const ResolvedSplit resolved = ResolveSplit(
            dataset, data_, *cmd, steer_split_, base.config.seed);
        const Split& split = resolved.split;
        const Matrix z = StandardizeSignatures(dataset.raw_attributes).signatures;
        const Vector weights =
            LoadWeightsFile(weights_, dataset.num_attributes());
        TrainConfig config = base.config;
        ApplyTrainOverrides(*cmd, steer_config_, config);
        config.seed = resolved.seed;
        config.Validate();
        for (Eigen::Index k = 0; k < weights.size(); ++k) {
          if (BelowSuggestedRange(weights(k))) {
            ctx.log->warn("attribute {} weight {:.2f} is below {:.1f}",
                          dataset.attribute_names[static_cast<std::size_t>(k)],
                          weights(k), kSuggestedMinWeight);
          }
        }
        const RetrainResult result = Retrain(
            dataset, split, z, SteeringState::FromWeights(weights), config);
        SaveCheckpoint({result.model, weights, config}, out_);
        const Metrics before =
            Evaluate(base.model, split.diag_instances, split.seen_classes,
                     dataset, z, base.attribute_weights);
        const Metrics after =
            Evaluate(result.model, split.diag_instances, split.seen_classes,
                     dataset, z, weights);
        ctx.log->info("holdout mean per-class accuracy {:.4f} -> {:.4f}",
                      before.mean_per_class_accuracy,
                      after.mean_per_class_accuracy);
        json report = {
            {"diag_before", MetricsToJson(before, dataset.class_names)},
            {"diag_after", MetricsToJson(after, dataset.class_names)},
            {"unseen_before", UnseenMetrics(base.model, dataset, split, z,
                                            base.attribute_weights)},
            {"unseen_after",
             UnseenMetrics(result.model, dataset, split, z, weights)},
            {"weights", VectorToJson(weights)},
            {"below_suggested", WeightList(weights)}};
        EmitJson(report, report_, ctx.out);
      };
    });
  }

  void AddServe(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("serve", "Start the HTTP service");
    cmd->add_option("--data", data_, "Dataset directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--model", model_, "Checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    serve_split_.Add(cmd, "Split, training and t-SNE seed (default: the "
                          "checkpoint's seed)");
    cmd->add_option("--host", host_, "Bind address");
    cmd->add_option("--port", port_, "Port (0 picks a free one)")
        ->check(CLI::Range(0, 65535));
    cmd->add_option("--static", static_dir_, "UI bundle directory")
        ->check(CLI::ExistingDirectory);
    cmd->add_flag("--evaluate-unseen", evaluate_unseen_,
                  "Report unseen-class accuracy in retrain results");
    AddTsneFlags(cmd, serve_tsne_, "tsne-");
    cmd->callback([this, cmd] {
      selected = [this, cmd](Context& ctx) {
        SessionData session;
        session.dataset = LoadDataset(data_);
        const Checkpoint checkpoint = LoadCheckpoint(model_);
        CheckModelFits(checkpoint.model, session.dataset, model_);
        const ResolvedSplit resolved = ResolveSplit(
            session.dataset, data_, *cmd, serve_split_, checkpoint.config.seed);
        session.split = resolved.split;
        session.signatures = StandardizeSignatures(session.dataset.raw_attributes);
        session.model = checkpoint.model;
        session.model_weights = checkpoint.attribute_weights;
        session.train_config = checkpoint.config;
        session.train_config.seed = resolved.seed;
        ServiceOptions options;
        options.tsne = serve_tsne_;
        options.tsne.seed = resolved.seed;
        options.static_dir = static_dir_;
        options.evaluate_unseen = evaluate_unseen_;
        Service service(options);
        service.Load(std::move(session));
        const int port = service.Start(host_, port_);
        ctx.log->info("listening on http://{}:{}", host_, port);
        ctx.out << "listening on " << host_ << ":" << port << std::endl;
        service.Listen(host_, port);
      };
    });
  }

  std::string data_;
  std::string model_;
  std::string weights_;
  std::string out_;
  std::string report_;
  std::string select_seen_;
  std::string select_unseen_;
  std::string project_unseen_;
  std::string host_ = "127.0.0.1";
  int port_ = 8080;
  std::string static_dir_;
  bool evaluate_unseen_ = false;
  SyntheticConfig synth_;
  double synth_diag_fraction_ = kDefaultDiagFraction;
  SplitFlags train_split_;
  SplitFlags eval_split_;
  SplitFlags diag_split_;
  SplitFlags steer_split_;
  SplitFlags serve_split_;
  TrainConfig train_config_;
  TrainConfig steer_config_;
  TsneConfig tsne_;
  TsneConfig serve_tsne_;
};

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"zslscope: zero-shot model diagnosis and steering"};
  app.name("zslscope");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough(false);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log per-epoch progress");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  Commands commands(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  sink->set_pattern("[%l] %v");
  Context ctx{out, std::make_shared<spdlog::logger>("zslscope", sink)};
  ctx.log->set_level(quiet     ? spdlog::level::warn
                     : verbose ? spdlog::level::debug
                               : spdlog::level::info);

  try {
    commands.selected(ctx);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace zslscope::cli
