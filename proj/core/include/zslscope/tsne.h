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

#ifndef ZSLSCOPE_TSNE_H_
#define ZSLSCOPE_TSNE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "zslscope/types.h"

namespace zslscope {

// Exact t-SNE. Category counts are small, so everything is O(N^2).
struct TsneConfig {
  // Unset means min(30, floor((N - 1) / 3)). Always capped to (N - 1) / 3
  // and floored at 1.
  std::optional<double> perplexity;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 200.0;
  double momentum_start = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iteration = 250;
  std::uint64_t seed = 0;

  void Validate() const;
};

inline constexpr double kMinProbability = 1e-12;
inline constexpr double kEntropyTolerance = 1e-10;
inline constexpr int kMaxBisectionSteps = 200;

double EffectivePerplexity(std::size_t num_points,
                           std::optional<double> requested);

struct ConditionalAffinities {
  Matrix conditional;  // row i is P(.|i), zero diagonal, rows sum to 1
  Vector precisions;   // beta_i applied to distances normalized per row
  double perplexity = 0.0;
};

// Per-row Gaussian bandwidths found by bisection so that each row's entropy
// matches log(perplexity). Squared distances are divided by their row mean
// first, which makes the result invariant to rescaling the input.
ConditionalAffinities ComputeConditionalAffinities(const Matrix& points,
                                                   double perplexity);

// Symmetrized joint affinities (P_{j|i} + P_{i|j}) / 2N.
Matrix ComputeAffinities(const Matrix& points, double perplexity);

struct ProjectionResult {
  Matrix coords;                   // N x 2, zero mean
  std::vector<double> kl_history;  // KL(P || Q) after each iteration
  std::vector<bool> seen_mask;     // empty unless filled by the caller
};

// Throws DivergenceError if the KL divergence becomes non-finite.
ProjectionResult Project(const Matrix& points, const TsneConfig& config);

double KlDivergence(const Matrix& joint_p, const Matrix& coords);

}  // namespace zslscope

#endif  // ZSLSCOPE_TSNE_H_
