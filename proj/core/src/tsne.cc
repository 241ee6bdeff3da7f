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

#include "zslscope/tsne.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "zslscope/errors.h"

namespace zslscope {
namespace {

Matrix SquaredDistances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double value = (points.row(i) - points.row(j)).squaredNorm();
      d(i, j) = value;
      d(j, i) = value;
    }
  }
  return d;
}

// Fills `row` with exp(-beta * dist) normalized, returns the entropy (nats).
// `dist` is already shifted so its minimum is zero, which keeps the largest
// exponent at exp(0) for any beta.
double RowDistribution(const std::vector<double>& dist, double beta,
                       std::vector<double>& row) {
  double sum = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    row[j] = std::exp(-beta * dist[j]);
    sum += row[j];
  }
  double weighted = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    row[j] /= sum;
    weighted += row[j] * dist[j];
  }
  return std::log(sum) + beta * weighted;
}

}  // namespace

void TsneConfig::Validate() const {
  if (perplexity && !(*perplexity > 0.0 && std::isfinite(*perplexity))) {
    throw InvalidArgument("perplexity must be finite and > 0");
  }
  if (iterations < 250) throw InvalidArgument("iterations must be >= 250");
  if (!(early_exaggeration >= 1.0)) {
    throw InvalidArgument("early_exaggeration must be >= 1");
  }
  if (exaggeration_iterations < 0 || momentum_switch_iteration < 0) {
    throw InvalidArgument("iteration schedule values must be >= 0");
  }
  if (!(learning_rate > 0.0)) {
    throw InvalidArgument("learning_rate must be > 0");
  }
  for (double m : {momentum_start, momentum_final}) {
    if (!(m >= 0.0 && m < 1.0)) {
      throw InvalidArgument("momentum must lie in [0, 1)");
    }
  }
}

double EffectivePerplexity(std::size_t num_points,
                           std::optional<double> requested) {
  if (num_points < 2) throw InvalidArgument("t-SNE needs at least 2 points");
  const double cap = static_cast<double>(num_points - 1) / 3.0;
  const double value =
      requested ? std::min(*requested, cap) : std::min(30.0, std::floor(cap));
  return std::max(1.0, value);
}

ConditionalAffinities ComputeConditionalAffinities(const Matrix& points,
                                                   double perplexity) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw InvalidArgument("t-SNE needs at least 2 points");
  if (!points.allFinite()) throw InvalidArgument("non-finite t-SNE input");
  if (!(perplexity > 0.0)) throw InvalidArgument("perplexity must be > 0");

  const Matrix distances = SquaredDistances(points);
  const double target = std::log(perplexity);

  ConditionalAffinities out;
  out.perplexity = perplexity;
  out.conditional = Matrix::Zero(n, n);
  out.precisions = Vector::Zero(n);

  std::vector<double> dist(static_cast<std::size_t>(n - 1));
  std::vector<double> row(dist.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dist[m++] = distances(i, j);
    }
    double mean = 0.0;
    for (double v : dist) mean += v;
    mean /= static_cast<double>(dist.size());
    if (mean > 0.0) {
      const double lowest = *std::min_element(dist.begin(), dist.end()) / mean;
      for (double& v : dist) v = v / mean - lowest;
    } else {
      std::fill(dist.begin(), dist.end(), 0.0);
    }

    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double entropy = RowDistribution(dist, beta, row);
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
      const double gap = entropy - target;
      if (std::abs(gap) <= kEntropyTolerance) break;
      if (gap > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
      entropy = RowDistribution(dist, beta, row);
    }
    out.precisions(i) = beta;
    m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) out.conditional(i, j) = row[m++];
    }
  }
  return out;
}

Matrix ComputeAffinities(const Matrix& points, double perplexity) {
  const Matrix conditional =
      ComputeConditionalAffinities(points, perplexity).conditional;
  const double scale = 1.0 / (2.0 * static_cast<double>(points.rows()));
  Matrix joint(conditional.rows(), conditional.cols());
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      joint(i, j) = (conditional(i, j) + conditional(j, i)) * scale;
    }
  }
  return joint;
}

double KlDivergence(const Matrix& joint_p, const Matrix& coords) {
  const Eigen::Index n = coords.rows();
  Matrix kernel = Matrix::Zero(n, n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      kernel(i, j) = 1.0 / (1.0 + (coords.row(i) - coords.row(j)).squaredNorm());
      total += kernel(i, j);
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = joint_p(i, j);
      if (i == j || p <= 0.0) continue;
      const double q = std::max(kernel(i, j) / total, kMinProbability);
      kl += p * std::log(std::max(p, kMinProbability) / q);
    }
  }
  return kl;
}

ProjectionResult Project(const Matrix& points, const TsneConfig& config) {
  config.Validate();
  const Eigen::Index n = points.rows();
  const Matrix p = ComputeAffinities(
      points, EffectivePerplexity(static_cast<std::size_t>(n), config.perplexity));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 1e-2);  // variance 1e-4
  Matrix y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, 0) = init(rng);
    y(i, 1) = init(rng);
  }
  Matrix update = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix grad(n, 2);
  Matrix kernel(n, n);

  ProjectionResult result;
  result.kl_history.reserve(static_cast<std::size_t>(config.iterations));
  for (int iter = 0; iter < config.iterations; ++iter) {
    const double exaggeration =
        iter < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      kernel(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double k = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
        kernel(i, j) = k;
        kernel(j, i) = k;
        total += 2.0 * k;
      }
    }
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(kernel(i, j) / total, kMinProbability);
        const double coeff = 4.0 * (exaggeration * p(i, j) - q) * kernel(i, j);
        grad.row(i) += coeff * (y.row(i) - y.row(j));
      }
    }

    const double momentum = iter < config.momentum_switch_iteration
                                ? config.momentum_start
                                : config.momentum_final;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2;
        gains(i, c) = std::max(gains(i, c), 0.01);
        update(i, c) = momentum * update(i, c) -
                       config.learning_rate * gains(i, c) * grad(i, c);
      }
    }
    y += update;
    y.rowwise() -= y.colwise().mean();

    const double kl = KlDivergence(p, y);
    if (!std::isfinite(kl) || !y.allFinite()) {
      throw DivergenceError("t-SNE", iter);
    }
    result.kl_history.push_back(kl);
  }
  result.coords = std::move(y);
  return result;
}

}  // namespace zslscope
