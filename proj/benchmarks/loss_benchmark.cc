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
#include <vector>

#include "zslscope/dataset.h"
#include "zslscope/model.h"

namespace zslscope {
namespace {

void BM_LossAndGradient(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto batch = static_cast<Eigen::Index>(state.range(1));
  SyntheticConfig config;
  config.seed = 1;
  const Dataset ds = GenerateSynthetic(config);
  const Matrix z = StandardizeSignatures(ds.raw_attributes).signatures;
  const MappingModel model = MappingModel::Initialize(
      ds.feature_dim(), hidden, ds.num_attributes(), 7);
  std::vector<ClassIndex> seen(config.num_seen);
  for (std::size_t c = 0; c < seen.size(); ++c) seen[c] = c;
  const Matrix x = ds.features.topRows(batch);
  const std::vector<ClassIndex> labels(ds.labels.begin(),
                                       ds.labels.begin() + batch);
  const Vector w = UnitWeights(ds.num_attributes());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ComputeLossAndGradient(model, x, labels, z, seen, w, 0.1, 1e-5));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_LossAndGradient)->Args({64, 64})->Args({512, 64})->Args({512, 256});

void BM_TrainEpoch(benchmark::State& state) {
  SyntheticConfig config;
  config.seed = 2;
  const Dataset ds = GenerateSynthetic(config);
  const Split split =
      MakeSplit(ds, SyntheticUnseenNames(config), kDefaultDiagFraction, 2);
  const Matrix z = StandardizeSignatures(ds.raw_attributes).signatures;
  TrainConfig train;
  train.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Train(ds, split, z, UnitWeights(ds.num_attributes()), train));
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zslscope
