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

#ifndef CLICKCERT_SIMULATE_H
#define CLICKCERT_SIMULATE_H

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "clickcert/channels.h"
#include "clickcert/network.h"
#include "clickcert/oracle.h"
#include "clickcert/states.h"

namespace clickcert {

/// Histogram of per-pulse click patterns.
///
/// Invariants: 1 <= channels <= kMaxChannels, every pattern < 2^channels, every stored
/// count > 0 and the counts sum to pulses(). Immutable.
class ClickDataset {
   public:
    using Histogram = std::map<ClickPattern, std::uint64_t>;

    /// Zero counts are dropped. Throws InvalidParameter when the invariants fail.
    ClickDataset(std::size_t channels, std::uint64_t pulses, Histogram histogram);
    static ClickDataset empty(std::size_t channels) { return ClickDataset(channels, 0, {}); }

    std::size_t channels() const { return channels_; }
    std::uint64_t pulses() const { return pulses_; }
    const Histogram &histogram() const { return histogram_; }
    std::uint64_t count(ClickPattern pattern) const;

    /// Pulses in which no channel of `block` clicked.
    std::uint64_t silent_count(ChannelSet block) const;
    /// Total clicks divided by pulses.
    double mean_clicks() const;

    bool operator==(const ClickDataset &) const = default;

   private:
    std::size_t channels_;
    std::uint64_t pulses_;
    Histogram histogram_;
};

/// Everything that determines a simulated dataset.
///
/// Pulses are cut into chunks of chunk_size; chunk c (0-based within this plan) draws from
/// the PhiloxStream keyed (seed, first_chunk + c). Two plans with the same seed whose chunk
/// ranges tile a larger plan merge into exactly that larger plan's dataset.
struct SimulationPlan {
    PhotonNumberDistribution state;
    SplittingConfig splitting;
    DetectorModel detectors;
    std::uint64_t pulses = 1;
    std::uint64_t seed = 0;
    std::uint64_t chunk_size = 65536;
    std::uint64_t first_chunk = 0;

    void validate() const;
};

/// Monte Carlo click record.
///
/// Per pulse: draw n ~ p_n; route each photon independently to channel k with probability
/// w_k (or to loss); channel k then clicks with probability 1 - q_k(n_k), which for linear
/// detectors is 1 - (1 - eta_k)^{n_k} exp(-nu_k). `threads` only changes scheduling: the
/// result is bit-identical for any value.
ClickDataset sample_dataset(const SimulationPlan &plan, unsigned threads = 1);

/// Summed histograms; all inputs must share the channel count.
ClickDataset merge(std::span<const ClickDataset> datasets);

/// Text form "CLICKHIST 1" (see dataset_io.cc for the grammar).
std::string format_dataset(const ClickDataset &dataset);
/// Strict parser of format_dataset output. `expected_channels`, when set, must match.
ClickDataset parse_dataset(std::string_view text, std::optional<std::size_t> expected_channels = std::nullopt);

void write_dataset(const ClickDataset &dataset, const std::filesystem::path &path);
ClickDataset read_dataset(const std::filesystem::path &path,
                          std::optional<std::size_t> expected_channels = std::nullopt);

}  // namespace clickcert

#endif
