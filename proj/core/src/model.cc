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

#include "zslscope/model.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "zslscope/errors.h"

namespace zslscope {
namespace {

void RequireSameLength(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
}

// sum_k f_k (w_k z_k), accumulated in attribute order. With w == 1 this is
// bit-identical to the unweighted dot product below.
double WeightedScore(const Vector& mapped, const double* signature,
                     const Vector& w) {
  double score = 0.0;
  for (Eigen::Index k = 0; k < mapped.size(); ++k) {
    score += mapped(k) * (w(k) * signature[k]);
  }
  return score;
}

void FillUniform(Matrix& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

void CheckSignatures(const Matrix& signatures, std::size_t num_attributes,
                     std::span<const ClassIndex> classes) {
  if (static_cast<std::size_t>(signatures.cols()) != num_attributes) {
    throw InvalidArgument("signature width (" +
                          std::to_string(signatures.cols()) +
                          ") != model output dimension (" +
                          std::to_string(num_attributes) + ")");
  }
  for (ClassIndex c : classes) {
    if (c >= static_cast<std::size_t>(signatures.rows())) {
      throw InvalidArgument("class index " + std::to_string(c) +
                            " has no signature row");
    }
  }
}

}  // namespace

MappingModel MappingModel::Zeros(std::size_t input_dim, std::size_t hidden_dim,
                                 std::size_t output_dim) {
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  const auto a = static_cast<Eigen::Index>(output_dim);
  MappingModel model;
  model.w1 = Matrix::Zero(h, d);
  model.b1 = Vector::Zero(h);
  model.w2 = Matrix::Zero(a, h);
  model.b2 = Vector::Zero(a);
  return model;
}

MappingModel MappingModel::Initialize(std::size_t input_dim,
                                      std::size_t hidden_dim,
                                      std::size_t output_dim,
                                      std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0) {
    throw InvalidArgument("model dimensions must be positive");
  }
  MappingModel model = Zeros(input_dim, hidden_dim, output_dim);
  std::mt19937_64 rng(seed);
  FillUniform(model.w1,
              std::sqrt(6.0 / static_cast<double>(input_dim + hidden_dim)),
              rng);
  FillUniform(model.w2,
              std::sqrt(6.0 / static_cast<double>(hidden_dim + output_dim)),
              rng);
  return model;
}

bool MappingModel::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

std::size_t MappingModel::num_parameters() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() +
                                  b2.size());
}

bool MappingModel::operator==(const MappingModel& other) const {
  const auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(w1, other.w1) && same(b1, other.b1) && same(w2, other.w2) &&
         same(b2, other.b2);
}

Vector Forward(const MappingModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.input_dim()) {
    throw InvalidArgument("forward: input has " + std::to_string(x.size()) +
                          " features, model expects " +
                          std::to_string(model.input_dim()));
  }
  const Vector hidden = (model.w1 * x + model.b1).cwiseMax(0.0);
  return model.w2 * hidden + model.b2;
}

Matrix ForwardBatch(const MappingModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw InvalidArgument("forward: input has " + std::to_string(x.cols()) +
                          " features, model expects " +
                          std::to_string(model.input_dim()));
  }
  Matrix hidden = x * model.w1.transpose();
  hidden.rowwise() += model.b1.transpose();
  hidden = hidden.cwiseMax(0.0);
  Matrix out = hidden * model.w2.transpose();
  out.rowwise() += model.b2.transpose();
  return out;
}

double Compatibility(const Vector& z1, const Vector& z2) {
  RequireSameLength(z1, z2, "compatibility");
  double score = 0.0;
  for (Eigen::Index k = 0; k < z1.size(); ++k) score += z1(k) * z2(k);
  return score;
}

double WeightedCompatibility(const Vector& z1, const Vector& z2,
                             const Vector& w) {
  RequireSameLength(z1, z2, "weighted compatibility");
  ValidateAttributeWeights(w, static_cast<std::size_t>(z1.size()));
  return WeightedScore(z1, z2.data(), w);
}

void ValidateAttributeWeights(const Vector& w, std::size_t num_attributes) {
  if (static_cast<std::size_t>(w.size()) != num_attributes) {
    throw InvalidArgument("attribute weights: expected " +
                          std::to_string(num_attributes) + " entries, got " +
                          std::to_string(w.size()));
  }
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (!(w(k) >= 0.0 && w(k) <= 1.0)) {
      throw InvalidArgument("attribute weight " + std::to_string(k) +
                            " is outside [0, 1]");
    }
  }
}

Vector UnitWeights(std::size_t num_attributes) {
  return Vector::Ones(static_cast<Eigen::Index>(num_attributes));
}

std::vector<ClassIndex> PredictMapped(const Matrix& mapped,
                                      std::span<const ClassIndex> candidates,
                                      const Matrix& signatures,
                                      const Vector& attribute_weights) {
  if (candidates.empty()) throw InvalidArgument("empty candidate set");
  const auto a = static_cast<std::size_t>(mapped.cols());
  CheckSignatures(signatures, a, candidates);
  ValidateAttributeWeights(attribute_weights, a);

  std::vector<ClassIndex> predictions(static_cast<std::size_t>(mapped.rows()));
  Vector row(mapped.cols());
  for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
    row = mapped.row(i).transpose();
    ClassIndex best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (ClassIndex c : candidates) {
      const double score = WeightedScore(
          row, signatures.row(static_cast<Eigen::Index>(c)).data(),
          attribute_weights);
      if (first || score > best_score ||
          (score == best_score && c < best)) {
        best = c;
        best_score = score;
        first = false;
      }
    }
    predictions[static_cast<std::size_t>(i)] = best;
  }
  return predictions;
}

ClassIndex Predict(const MappingModel& model, const Vector& x,
                   std::span<const ClassIndex> candidate_classes,
                   const Matrix& signatures, const Vector& attribute_weights) {
  const Vector mapped = Forward(model, x);
  Matrix as_row = mapped.transpose();
  return PredictMapped(as_row, candidate_classes, signatures,
                       attribute_weights)
      .front();
}

std::vector<InstanceIndex> InstancesOfClasses(
    const Dataset& dataset, std::span<const ClassIndex> classes) {
  std::vector<bool> wanted(dataset.num_classes(), false);
  for (ClassIndex c : classes) wanted.at(c) = true;
  std::vector<InstanceIndex> out;
  for (InstanceIndex i = 0; i < dataset.num_instances(); ++i) {
    if (wanted[dataset.labels[i]]) out.push_back(i);
  }
  return out;
}

Metrics Evaluate(const MappingModel& model,
                 std::span<const InstanceIndex> instances,
                 std::span<const ClassIndex> candidate_classes,
                 const Dataset& dataset, const Matrix& signatures,
                 const Vector& attribute_weights) {
  if (candidate_classes.empty()) throw InvalidArgument("empty candidate set");
  std::vector<bool> is_candidate(dataset.num_classes(), false);
  for (ClassIndex c : candidate_classes) is_candidate.at(c) = true;

  Matrix x(static_cast<Eigen::Index>(instances.size()), dataset.features.cols());
  for (std::size_t r = 0; r < instances.size(); ++r) {
    const InstanceIndex i = instances[r];
    if (i >= dataset.num_instances()) {
      throw InvalidArgument("instance index out of range");
    }
    if (!is_candidate[dataset.labels[i]]) {
      throw InvalidArgument("instance " + std::to_string(i) + " has label '" +
                            dataset.class_names[dataset.labels[i]] +
                            "' outside the candidate classes");
    }
    x.row(static_cast<Eigen::Index>(r)) =
        dataset.features.row(static_cast<Eigen::Index>(i));
  }

  Metrics metrics;
  for (ClassIndex c : candidate_classes) metrics.per_class[c];
  if (instances.empty()) return metrics;

  const std::vector<ClassIndex> predicted = PredictMapped(
      ForwardBatch(model, x), candidate_classes, signatures, attribute_weights);
  for (std::size_t r = 0; r < instances.size(); ++r) {
    const ClassIndex truth = dataset.labels[instances[r]];
    ClassAccuracy& entry = metrics.per_class[truth];
    ++entry.total;
    if (predicted[r] == truth) {
      ++entry.correct;
      ++metrics.correct;
    }
  }
  metrics.total = instances.size();
  metrics.overall_accuracy =
      static_cast<double>(metrics.correct) / static_cast<double>(metrics.total);

  // Classes without instances do not enter the per-class mean.
  double sum = 0.0;
  std::size_t populated = 0;
  for (const auto& [c, entry] : metrics.per_class) {
    if (entry.total == 0) continue;
    sum += entry.accuracy();
    ++populated;
  }
  metrics.mean_per_class_accuracy =
      populated == 0 ? 0.0 : sum / static_cast<double>(populated);
  return metrics;
}

}  // namespace zslscope
