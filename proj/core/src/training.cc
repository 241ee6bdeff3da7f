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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "zslscope/errors.h"
#include "zslscope/model.h"

namespace zslscope {
namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

double SquaredNorm(const MappingModel& m) {
  return m.w1.squaredNorm() + m.b1.squaredNorm() + m.w2.squaredNorm() +
         m.b2.squaredNorm();
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw InvalidArgument("margin must be finite and >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be finite and > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidArgument("momentum must lie in [0, 1)");
  }
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw InvalidArgument("weight_decay must be finite and >= 0");
  }
  if (hidden_dim < 1) throw InvalidArgument("hidden_dim must be >= 1");
}

LossAndGradient ComputeLossAndGradient(const MappingModel& model,
                                       const Matrix& batch_features,
                                       std::span<const ClassIndex> batch_labels,
                                       const Matrix& signatures,
                                       std::span<const ClassIndex> seen_classes,
                                       const Vector& attribute_weights,
                                       double margin, double weight_decay) {
  const Eigen::Index batch = batch_features.rows();
  if (batch == 0) throw InvalidArgument("empty batch");
  if (static_cast<std::size_t>(batch) != batch_labels.size()) {
    throw InvalidArgument("batch features and labels differ in length");
  }
  if (static_cast<std::size_t>(batch_features.cols()) != model.input_dim()) {
    throw InvalidArgument("batch feature width != model input dimension");
  }
  const std::size_t a = model.output_dim();
  if (static_cast<std::size_t>(signatures.cols()) != a) {
    throw InvalidArgument("signature width != model output dimension");
  }
  ValidateAttributeWeights(attribute_weights, a);
  if (seen_classes.size() < 2) {
    throw InvalidArgument(
        "need at least 2 seen classes (no competitor after excluding the "
        "true class)");
  }

  // Position of each seen class inside `seen`.
  std::vector<Eigen::Index> position(static_cast<std::size_t>(signatures.rows()),
                                     -1);
  Matrix seen(static_cast<Eigen::Index>(seen_classes.size()),
              static_cast<Eigen::Index>(a));
  for (std::size_t j = 0; j < seen_classes.size(); ++j) {
    const ClassIndex c = seen_classes[j];
    if (c >= position.size()) {
      throw InvalidArgument("seen class without a signature row");
    }
    position[c] = static_cast<Eigen::Index>(j);
    seen.row(static_cast<Eigen::Index>(j)) =
        signatures.row(static_cast<Eigen::Index>(c)).cwiseProduct(
            attribute_weights.transpose());
  }

  Matrix pre = batch_features * model.w1.transpose();
  pre.rowwise() += model.b1.transpose();
  const Matrix hidden = pre.cwiseMax(0.0);
  Matrix mapped = hidden * model.w2.transpose();
  mapped.rowwise() += model.b2.transpose();
  const Matrix scores = mapped * seen.transpose();

  // d loss / d mapped, one row per instance.
  Matrix upstream = Matrix::Zero(batch, static_cast<Eigen::Index>(a));
  double hinge_sum = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const ClassIndex truth = batch_labels[static_cast<std::size_t>(i)];
    if (truth >= position.size() || position[truth] < 0) {
      throw InvalidArgument("batch label " + std::to_string(truth) +
                            " is not a seen class");
    }
    const Eigen::Index t = position[truth];
    Eigen::Index violator = -1;
    for (std::size_t j = 0; j < seen_classes.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (jj == t) continue;
      if (violator < 0 || scores(i, jj) > scores(i, violator) ||
          (scores(i, jj) == scores(i, violator) &&
           seen_classes[j] < seen_classes[static_cast<std::size_t>(violator)])) {
        violator = jj;
      }
    }
    const double argument = scores(i, violator) - scores(i, t) + margin;
    if (argument > 0.0) {
      hinge_sum += argument;
      upstream.row(i) = (seen.row(violator) - seen.row(t)) * inv_batch;
    }
  }

  LossAndGradient out;
  out.loss = hinge_sum * inv_batch + 0.5 * weight_decay * SquaredNorm(model);

  MappingModel& grad = out.gradient;
  grad.w2 = upstream.transpose() * hidden;
  grad.b2 = upstream.colwise().sum().transpose();
  Matrix hidden_grad = upstream * model.w2;
  for (Eigen::Index i = 0; i < pre.rows(); ++i) {
    for (Eigen::Index j = 0; j < pre.cols(); ++j) {
      if (!(pre(i, j) > 0.0)) hidden_grad(i, j) = 0.0;
    }
  }
  grad.w1 = hidden_grad.transpose() * batch_features;
  grad.b1 = hidden_grad.colwise().sum().transpose();
  if (weight_decay > 0.0) {
    grad.w1 += weight_decay * model.w1;
    grad.b1 += weight_decay * model.b1;
    grad.w2 += weight_decay * model.w2;
    grad.b2 += weight_decay * model.b2;
  }
  return out;
}

TrainResult Train(const Dataset& dataset, const Split& split,
                  const Matrix& signatures, const Vector& attribute_weights,
                  const TrainConfig& config) {
  config.Validate();
  const std::size_t a = dataset.num_attributes();
  if (static_cast<std::size_t>(signatures.rows()) != dataset.num_classes() ||
      static_cast<std::size_t>(signatures.cols()) != a) {
    throw InvalidArgument("signature matrix shape does not match dataset");
  }
  ValidateAttributeWeights(attribute_weights, a);
  if (split.train_instances.empty()) {
    throw InvalidArgument("split has no training instances");
  }
  for (InstanceIndex i : split.train_instances) {
    if (i >= dataset.num_instances() || !split.IsSeen(dataset.labels[i])) {
      throw InvalidArgument("training instance " + std::to_string(i) +
                            " is not a seen-class instance");
    }
  }

  // z' = diag(w) z, then train with the plain dot product.
  Matrix scaled = signatures;
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
    scaled.col(k) *= attribute_weights(k);
  }
  const Vector ones = UnitWeights(a);

  TrainResult result;
  MappingModel& model = result.model;
  model = MappingModel::Initialize(dataset.feature_dim(), config.hidden_dim, a,
                                   config.seed);
  MappingModel velocity =
      MappingModel::Zeros(dataset.feature_dim(), config.hidden_dim, a);

  std::vector<InstanceIndex> order = split.train_instances;
  std::mt19937_64 rng(config.seed ^ kShuffleStream);
  const std::size_t n = order.size();
  const auto d = static_cast<Eigen::Index>(dataset.feature_dim());
  Matrix batch_x;
  std::vector<ClassIndex> batch_y;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t size = std::min(config.batch_size, n - start);
      batch_x.resize(static_cast<Eigen::Index>(size), d);
      batch_y.resize(size);
      for (std::size_t r = 0; r < size; ++r) {
        const InstanceIndex i = order[start + r];
        batch_x.row(static_cast<Eigen::Index>(r)) =
            dataset.features.row(static_cast<Eigen::Index>(i));
        batch_y[r] = dataset.labels[i];
      }
      const LossAndGradient step = ComputeLossAndGradient(
          model, batch_x, batch_y, scaled, split.seen_classes, ones,
          config.margin, config.weight_decay);
      if (!std::isfinite(step.loss)) throw DivergenceError("training", epoch);
      epoch_loss += step.loss * static_cast<double>(size);

      const double mu = config.momentum;
      const double lr = config.learning_rate;
      velocity.w1 = mu * velocity.w1 - lr * step.gradient.w1;
      velocity.b1 = mu * velocity.b1 - lr * step.gradient.b1;
      velocity.w2 = mu * velocity.w2 - lr * step.gradient.w2;
      velocity.b2 = mu * velocity.b2 - lr * step.gradient.b2;
      model.w1 += velocity.w1;
      model.b1 += velocity.b1;
      model.w2 += velocity.w2;
      model.b2 += velocity.b2;
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss) || !model.AllFinite()) {
      throw DivergenceError("training", epoch);
    }
    result.report.loss_history.push_back(epoch_loss);
  }
  result.report.epochs_run = config.epochs;
  result.report.final_loss = result.report.loss_history.back();
  return result;
}

}  // namespace zslscope
