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


#include <benchmark/benchmark.h>

#include <random>

#include "zslscope/tsne.h"

namespace zslscope {
namespace {

Matrix RandomPoints(Eigen::Index n, Eigen::Index dim) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  Matrix m(n, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

void BM_Affinities(benchmark::State& state) {
  const Matrix points = RandomPoints(state.range(0), 85);
  const double perplexity = EffectivePerplexity(points.rows(), std::nullopt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeAffinities(points, perplexity));
  }
}
BENCHMARK(BM_Affinities)->Arg(50)->Arg(200);

void BM_Project(benchmark::State& state) {
  const Matrix points = RandomPoints(state.range(0), 85);
  TsneConfig config;
  config.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Project(points, config));
  }
}
BENCHMARK(BM_Project)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zslscope
