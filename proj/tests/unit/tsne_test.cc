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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "zslscope/errors.h"
#include "zslscope/tsne.h"

namespace zslscope {
namespace {

double RowPerplexity(const Matrix& conditional, Eigen::Index i) {
  double entropy = 0.0;
  for (Eigen::Index j = 0; j < conditional.cols(); ++j) {
    const double p = conditional(i, j);
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

Matrix RandomInput(std::uint64_t seed, Eigen::Index n = 50, Eigen::Index a = 85) {
  std::mt19937_64 rng(seed);
  return testing::RandomNormal(n, a, rng);
}

TEST(PerplexityTest, DefaultsAndCaps) {
  EXPECT_DOUBLE_EQ(EffectivePerplexity(50, std::nullopt), 16.0);
  EXPECT_DOUBLE_EQ(EffectivePerplexity(200, std::nullopt), 30.0);
  EXPECT_DOUBLE_EQ(EffectivePerplexity(50, 40.0), 49.0 / 3.0);
  EXPECT_DOUBLE_EQ(EffectivePerplexity(50, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(EffectivePerplexity(2, std::nullopt), 1.0);
  EXPECT_THROW(EffectivePerplexity(1, std::nullopt), InvalidArgument);
}

TEST(AffinityTest, EquidistantPointsGiveUniformRows) {
  const Matrix triangle{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  const ConditionalAffinities c = ComputeConditionalAffinities(triangle, 2.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_NEAR(c.conditional(i, j), i == j ? 0.0 : 0.5, 1e-12);
    }
  }
}

TEST(AffinityTest, RowsHitTargetPerplexity) {
  const Matrix x = RandomInput(1);
  for (double target : {5.0, 16.0}) {
    const ConditionalAffinities c = ComputeConditionalAffinities(x, target);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      EXPECT_NEAR(c.conditional.row(i).sum(), 1.0, 1e-12);
      EXPECT_EQ(c.conditional(i, i), 0.0);
      EXPECT_NEAR(RowPerplexity(c.conditional, i), target, 1e-4);
    }
  }
}

TEST(AffinityTest, RowsAreGaussianInNormalizedDistance) {
  const Matrix x = RandomInput(2, 12, 6);
  const ConditionalAffinities c = ComputeConditionalAffinities(x, 3.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      if (j != i) mean += (x.row(i) - x.row(j)).squaredNorm();
    }
    mean /= static_cast<double>(x.rows() - 1);
    const Eigen::Index ref = i == 0 ? 1 : 0;
    const double d_ref = (x.row(i) - x.row(ref)).squaredNorm();
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      if (j == i || j == ref) continue;
      const double d = (x.row(i) - x.row(j)).squaredNorm();
      const double expected = -c.precisions(i) * (d - d_ref) / mean;
      EXPECT_NEAR(std::log(c.conditional(i, j) / c.conditional(i, ref)),
                  expected, 1e-9);
    }
  }
}

TEST(AffinityTest, JointLaws) {
  const Matrix x = RandomInput(3);
  const Matrix p = ComputeAffinities(x, 16.0);
  EXPECT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(p.sum(), 1.0, 1e-9);
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_TRUE(p.diagonal().isZero(0.0));
}

TEST(AffinityTest, ScaleInvariant) {
  const Matrix x = RandomInput(4);
  const Matrix p = ComputeAffinities(x, 10.0);
  for (double c : {0.01, 3.0, 250.0}) {
    EXPECT_LE((ComputeAffinities(c * x, 10.0) - p).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(AffinityTest, RejectsBadInput) {
  EXPECT_THROW(ComputeAffinities(Matrix::Zero(1, 3), 1.0), InvalidArgument);
  Matrix x = RandomInput(5, 4, 2);
  x(1, 1) = std::nan("");
  EXPECT_THROW(ComputeAffinities(x, 1.0), InvalidArgument);
  EXPECT_THROW(ComputeAffinities(RandomInput(5, 4, 2), 0.0), InvalidArgument);
}

TEST(KlTest, MatchesDirectFormula) {
  const Matrix x = RandomInput(6, 10, 4);
  const Matrix p = ComputeAffinities(x, 3.0);
  std::mt19937_64 rng(7);
  const Matrix y = testing::RandomNormal(10, 2, rng);
  double z = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (i != j) z += 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (i == j) continue;
      const double q = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm()) / z;
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  EXPECT_NEAR(KlDivergence(p, y), kl, 1e-12);
  EXPECT_GE(KlDivergence(p, y), 0.0);
}

TEST(ProjectTest, KlDecreasesAfterExaggeration) {
  const TsneConfig config;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TsneConfig c = config;
    c.seed = seed;
    const ProjectionResult r = Project(RandomInput(seed), c);
    ASSERT_EQ(r.kl_history.size(), 1000u);
    EXPECT_LE(r.kl_history.back(), r.kl_history[249]) << "seed " << seed;
    for (double kl : r.kl_history) {
      EXPECT_TRUE(std::isfinite(kl));
      EXPECT_GE(kl, 0.0);
    }
    EXPECT_EQ(r.coords.rows(), 50);
    EXPECT_EQ(r.coords.cols(), 2);
    EXPECT_TRUE(r.coords.allFinite());
    EXPECT_LE(r.coords.colwise().mean().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ProjectTest, TwoPoints) {
  const ProjectionResult r = Project(RandomInput(8, 2, 5), TsneConfig{});
  EXPECT_GT((r.coords.row(0) - r.coords.row(1)).norm(), 0.0);
  EXPECT_TRUE(std::isfinite(r.kl_history.back()));
}

TEST(ProjectTest, Deterministic) {
  TsneConfig config;
  config.seed = 17;
  config.iterations = 300;
  const Matrix x = RandomInput(9, 20, 7);
  const ProjectionResult a = Project(x, config);
  const ProjectionResult b = Project(x, config);
  EXPECT_TRUE((a.coords.array() == b.coords.array()).all());
  EXPECT_EQ(a.kl_history, b.kl_history);
  config.seed = 18;
  EXPECT_FALSE((Project(x, config).coords.array() == a.coords.array()).all());
}

TEST(ProjectTest, ConfigValidation) {
  TsneConfig config;
  config.iterations = 100;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.perplexity = -1.0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  config = {};
  config.momentum_final = 1.0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
}

}  // namespace
}  // namespace zslscope
