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

#include "clickcert/criteria.h"
#include "clickcert/estimate.h"

namespace clickcert {
namespace {

ClickDataset sample(std::size_t channels) {
    SimulationPlan plan{thermal(1.5), SplittingConfig::symmetric(channels), DetectorModel::uniform(channels, 0.5),
                        500'000, 3, 65536, 0};
    return sample_dataset(plan, 1);
}

void BM_PartitionEstimate(benchmark::State &state) {
    const ClickDataset data = sample(8);
    const Partition p = full_partition(8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(partition_estimate(data, p));
    }
}
BENCHMARK(BM_PartitionEstimate);

void BM_RankEmpirical(benchmark::State &state) {
    const MomentSource src = MomentSource::empirical(sample(6));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_partitions(src, 6));
    }
}
BENCHMARK(BM_RankEmpirical)->Unit(benchmark::kMillisecond);

void BM_SymmetrizedEstimates(benchmark::State &state) {
    const ClickDataset data = sample(8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_b_estimate(data));
        benchmark::DoNotOptimize(matrix_of_moments_estimate(data));
    }
}
BENCHMARK(BM_SymmetrizedEstimates);

void BM_Bootstrap(benchmark::State &state) {
    const ClickDataset data = sample(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_partition(data, full_partition(4), 100, 9));
    }
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace clickcert
