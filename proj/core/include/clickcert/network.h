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

#ifndef CLICKCERT_NETWORK_H
#define CLICKCERT_NETWORK_H

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clickcert/channels.h"

namespace clickcert {

/// First-row intensity weights w_k = |u_{1,k}|^2 of the multiport splitter, plus the
/// fraction of light routed to an undetected loss pseudo-channel.
class SplittingConfig {
   public:
    /// Validates weights >= 0 and sum(weights) + loss = 1. Sums off by less than 1e-9 are
    /// renormalized; larger deviations are rejected.
    static SplittingConfig make(std::vector<double> weights, double loss_weight = 0.0);
    /// N equal weights (1 - loss) / N.
    static SplittingConfig symmetric(std::size_t channels, double loss_weight = 0.0);

    std::size_t channels() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double weight(std::size_t channel) const { return weights_.at(channel); }
    double loss_weight() const { return loss_weight_; }
    /// Channels whose weights are all equal (exactly, after construction).
    bool is_uniform() const;

   private:
    SplittingConfig() = default;
    std::vector<double> weights_;
    double loss_weight_ = 0.0;
};

SplittingConfig make_splitting(std::vector<double> weights, double loss_weight = 0.0);

/// Mutually disjoint, non-empty channel blocks I_1..I_K.
///
/// Always held in canonical order: blocks sorted by their smallest channel. Blocks need not
/// cover every channel; uncovered channels are marginalized.
class Partition {
   public:
    Partition() = default;
    /// Validates and canonicalizes. Throws InvalidParameter on empty or overlapping blocks.
    explicit Partition(std::vector<ChannelSet> blocks);

    std::span<const ChannelSet> blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    ChannelSet channels() const;
    /// Every block lies inside channels 0..n-1.
    bool fits(std::size_t n) const;

    bool operator==(const Partition &) const = default;

   private:
    std::vector<ChannelSet> blocks_;
};

/// Canonical form of arbitrary blocks given as 0-based index lists.
Partition canonical_partition(const std::vector<std::vector<std::size_t>> &blocks);

/// All set partitions of {0..n-1} with at least `min_blocks` blocks, in a fixed order
/// (restricted-growth strings, lexicographic). Requires 1 <= min_blocks <= n <= 12.
std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t min_blocks);
/// Streaming form of enumerate_partitions; avoids materializing Bell(n) partitions.
void for_each_partition(std::size_t n, std::size_t min_blocks, const std::function<void(const Partition &)> &visit);

/// Bell number B(n) via the Bell triangle; n <= 25.
unsigned long long bell_number(std::size_t n);

/// "1,2|3|4": blocks separated by '|', 1-based channel indices separated by ','.
Partition parse_partition(std::string_view text);
std::string format_partition(const Partition &partition);

/// The full partition {{1},{2},...,{N}}.
Partition full_partition(std::size_t channels);

}  // namespace clickcert

#endif
