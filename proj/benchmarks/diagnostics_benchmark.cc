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

#include <vector>

#include "zslscope/dataset.h"
#include "zslscope/diagnostics.h"
#include "zslscope/model.h"

namespace zslscope {
namespace {

struct Fixture {
  Dataset dataset;
  Split split;
  Matrix signatures;
  MappingModel model;
};

const Fixture& Shared() {
  static const Fixture f = [] {
    SyntheticConfig config;
    config.seed = 3;
    config.noise_sigma = 1.0;
    Fixture out;
    out.dataset = GenerateSynthetic(config);
    out.split = MakeSplit(out.dataset, SyntheticUnseenNames(config),
                          kDefaultDiagFraction, 3);
    out.signatures = StandardizeSignatures(out.dataset.raw_attributes).signatures;
    out.model = MappingModel::Initialize(out.dataset.feature_dim(), 128,
                                         out.dataset.num_attributes(), 3);
    return out;
  }();
  return f;
}

void BM_CollectMispredictions(benchmark::State& state) {
  const Fixture& f = Shared();
  const Vector w = UnitWeights(f.dataset.num_attributes());
  for (auto _ : state) {
    benchmark::DoNotOptimize(CollectMispredictions(
        f.model, f.split.diag_instances, f.split.seen_classes, f.dataset,
        f.signatures, w));
  }
}
BENCHMARK(BM_CollectMispredictions);

void BM_AggregateAndSort(benchmark::State& state) {
  const Fixture& f = Shared();
  const Vector w = UnitWeights(f.dataset.num_attributes());
  const auto records =
      CollectMispredictions(f.model, f.split.diag_instances,
                            f.split.seen_classes, f.dataset, f.signatures, w);
  const auto counts = CountPerClass(f.dataset, f.split.diag_instances);
  for (auto _ : state) {
    const DiagnosticsSummary summary =
        AggregateScores(records, f.split.seen_classes, counts,
                        f.dataset.num_attributes());
    benchmark::DoNotOptimize(SortAttributes(summary, SortKey::kTotal));
    benchmark::DoNotOptimize(StackingOrder(summary, StackBasis::kTotal));
  }
  state.counters["records"] = static_cast<double>(records.size());
}
BENCHMARK(BM_AggregateAndSort);

}  // namespace
}  // namespace zslscope
