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

#ifndef ZSLSCOPE_MODEL_H_
#define ZSLSCOPE_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "zslscope/dataset.h"
#include "zslscope/types.h"

namespace zslscope {

// Two-layer network f(x) = W2 relu(W1 x + b1) + b2 mapping features into the
// attribute space.
struct MappingModel {
  Matrix w1;  // h x d
  Vector b1;  // h
  Matrix w2;  // a x h
  Vector b2;  // a

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_dim() const {
    return static_cast<std::size_t>(w1.rows());
  }
  std::size_t output_dim() const {
    return static_cast<std::size_t>(w2.rows());
  }

  static MappingModel Zeros(std::size_t input_dim, std::size_t hidden_dim,
                            std::size_t output_dim);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static MappingModel Initialize(std::size_t input_dim,
                                 std::size_t hidden_dim,
                                 std::size_t output_dim, std::uint64_t seed);

  bool AllFinite() const;
  std::size_t num_parameters() const;

  bool operator==(const MappingModel& other) const;
};

Vector Forward(const MappingModel& model, const Vector& x);

// Row i of the result is f(row i of `x`).
Matrix ForwardBatch(const MappingModel& model, const Matrix& x);

double Compatibility(const Vector& z1, const Vector& z2);

// sum_k w_k z1_k z2_k, i.e. z1' diag(w) z2. Weights must lie in [0, 1].
double WeightedCompatibility(const Vector& z1, const Vector& z2,
                             const Vector& w);

struct TrainConfig {
  double margin = 0.1;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  int epochs = 50;
  double weight_decay = 1e-5;
  std::size_t hidden_dim = 512;
  std::uint64_t seed = 0;

  // Throws InvalidArgument naming the offending field.
  void Validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainReport {
  std::vector<double> loss_history;  // mean batch loss per epoch
  double final_loss = 0.0;
  int epochs_run = 0;
};

struct LossAndGradient {
  double loss = 0.0;
  MappingModel gradient;
};

// Mean over the batch of the max-margin hinge
//   max_{y in seen, y != y_i} [ s_w(f(x_i), z_y) - s_w(f(x_i), z_{y_i}) + margin ]_+
// plus weight_decay / 2 times the squared norm of all parameters. Only the
// highest-scoring violator (lowest index on ties) receives gradient; an
// instance whose hinge argument is <= 0 contributes none.
LossAndGradient ComputeLossAndGradient(const MappingModel& model,
                                       const Matrix& batch_features,
                                       std::span<const ClassIndex> batch_labels,
                                       const Matrix& signatures,
                                       std::span<const ClassIndex> seen_classes,
                                       const Vector& attribute_weights,
                                       double margin, double weight_decay);

struct TrainResult {
  MappingModel model;
  TrainReport report;
};

// Mini-batch SGD with momentum over split.train_instances. The weighted
// compatibility is realized by training against diag(w)-scaled signatures.
// Deterministic in (dataset, split, signatures, weights, config).
TrainResult Train(const Dataset& dataset, const Split& split,
                  const Matrix& signatures, const Vector& attribute_weights,
                  const TrainConfig& config);

// argmax over candidates of s_w(f(x), z_y); ties go to the lowest index.
ClassIndex Predict(const MappingModel& model, const Vector& x,
                   std::span<const ClassIndex> candidate_classes,
                   const Matrix& signatures, const Vector& attribute_weights);

// Same rule applied to each row of pre-mapped outputs.
std::vector<ClassIndex> PredictMapped(const Matrix& mapped,
                                      std::span<const ClassIndex> candidates,
                                      const Matrix& signatures,
                                      const Vector& attribute_weights);

struct ClassAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
  bool operator==(const ClassAccuracy&) const = default;
};

struct Metrics {
  std::map<ClassIndex, ClassAccuracy> per_class;
  double mean_per_class_accuracy = 0.0;
  double overall_accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;

  bool operator==(const Metrics&) const = default;
};

Metrics Evaluate(const MappingModel& model,
                 std::span<const InstanceIndex> instances,
                 std::span<const ClassIndex> candidate_classes,
                 const Dataset& dataset, const Matrix& signatures,
                 const Vector& attribute_weights);

// Instances of `dataset` whose label is one of `classes`, ascending.
std::vector<InstanceIndex> InstancesOfClasses(
    const Dataset& dataset, std::span<const ClassIndex> classes);

Vector UnitWeights(std::size_t num_attributes);

// Throws InvalidArgument unless `w` has `num_attributes` finite entries in
// [0, 1].
void ValidateAttributeWeights(const Vector& w, std::size_t num_attributes);

}  // namespace zslscope

#endif  // ZSLSCOPE_MODEL_H_
