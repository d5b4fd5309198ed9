// Copyright 2026 The clickcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "clickcert/simulate.h"

namespace clickcert {
namespace {

void BM_SimulateCluster(benchmark::State &state) {
    const auto cluster = emitter_cluster({14, 0.991, 0.009, 0.0});
    const auto threads = static_cast<unsigned>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SimulationPlan plan{cluster, SplittingConfig::symmetric(4), DetectorModel::uniform(4, 1.0), 1'000'000, seed++,
                            65536, 0};
        benchmark::DoNotOptimize(sample_dataset(plan, threads));
    }
    state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_SimulateCluster)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SimulateThermalNoisy(benchmark::State &state) {
    const auto light = thermal(2.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SimulationPlan plan{light, SplittingConfig::symmetric(n), DetectorModel::uniform(n, 0.6, 0.01), 200'000,
                            seed++, 65536, 0};
        benchmark::DoNotOptimize(sample_dataset(plan, 1));
    }
    state.SetItemsProcessed(state.iterations() * 200'000);
}
BENCHMARK(BM_SimulateThermalNoisy)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FormatParseDataset(benchmark::State &state) {
    SimulationPlan plan{thermal(2.0), SplittingConfig::symmetric(8), DetectorModel::uniform(8, 0.6), 200'000, 1,
                        65536, 0};
    const ClickDataset data = sample_dataset(plan, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_dataset(format_dataset(data)));
    }
}
BENCHMARK(BM_FormatParseDataset);

}  // namespace
}  // namespace clickcert
