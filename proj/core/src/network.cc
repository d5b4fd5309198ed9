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

#include "clickcert/network.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "clickcert/errors.h"

namespace clickcert {

namespace {

constexpr std::size_t kMaxEnumeratedChannels = 12;

}  // namespace

SplittingConfig SplittingConfig::make(std::vector<double> weights, double loss_weight) {
    if (weights.empty()) {
        throw InvalidParameter("splitting needs at least one channel");
    }
    if (weights.size() > kMaxChannels) {
        throw InvalidParameter("splitting has more than " + std::to_string(kMaxChannels) + " channels");
    }
    if (!std::isfinite(loss_weight) || loss_weight < 0.0) {
        throw InvalidParameter("loss weight must be finite and non-negative");
    }
    double sum = loss_weight;
    for (double w : weights) {
        if (!std::isfinite(w)) {
            throw InvalidParameter("splitting weights must be finite");
        }
        if (w < 0.0) {
            throw InvalidParameter("splitting weights must be non-negative");
        }
        sum += w;
    }
    double deviation = sum - 1.0;
    if (std::abs(deviation) >= 1e-9) {
        throw InvalidParameter(deviation > 0 ? "splitting weights exceed 1" : "splitting weights sum below 1");
    }
    if (deviation != 0.0) {
        for (double &w : weights) {
            w /= sum;
        }
        loss_weight /= sum;
    }
    SplittingConfig config;
    config.weights_ = std::move(weights);
    config.loss_weight_ = loss_weight;
    return config;
}

SplittingConfig SplittingConfig::symmetric(std::size_t channels, double loss_weight) {
    if (channels == 0) {
        throw InvalidParameter("splitting needs at least one channel");
    }
    if (!std::isfinite(loss_weight) || loss_weight < 0.0 || loss_weight > 1.0) {
        throw InvalidParameter("loss weight must lie in [0, 1]");
    }
    double w = (1.0 - loss_weight) / static_cast<double>(channels);
    return make(std::vector<double>(channels, w), loss_weight);
}

bool SplittingConfig::is_uniform() const {
    return std::all_of(weights_.begin(), weights_.end(), [&](double w) { return w == weights_.front(); });
}

SplittingConfig make_splitting(std::vector<double> weights, double loss_weight) {
    return SplittingConfig::make(std::move(weights), loss_weight);
}

Partition::Partition(std::vector<ChannelSet> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
        throw InvalidParameter("partition needs at least one block");
    }
    ChannelSet seen;
    for (ChannelSet b : blocks_) {
        if (b.empty()) {
            throw InvalidParameter("partition blocks must be non-empty");
        }
        if (b.intersects(seen)) {
            throw InvalidParameter("partition blocks overlap");
        }
        seen |= b;
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](ChannelSet a, ChannelSet b) { return a.smallest() < b.smallest(); });
}

ChannelSet Partition::channels() const {
    ChannelSet all;
    for (ChannelSet b : blocks_) {
        all |= b;
    }
    return all;
}

bool Partition::fits(std::size_t n) const { return channels().span_end() <= n; }

Partition canonical_partition(const std::vector<std::vector<std::size_t>> &blocks) {
    std::vector<ChannelSet> sets;
    sets.reserve(blocks.size());
    for (const auto &block : blocks) {
        ChannelSet s;
        for (std::size_t c : block) {
            if (s.contains(c)) {
                throw InvalidParameter("partition block repeats channel " + std::to_string(c + 1));
            }
            s = s.with(c);
        }
        sets.push_back(s);
    }
    return Partition(std::move(sets));
}

void for_each_partition(std::size_t n, std::size_t min_blocks, const std::function<void(const Partition &)> &visit) {
    if (n < 1 || n > kMaxEnumeratedChannels) {
        throw InvalidParameter("partition enumeration supports 1 to 12 channels");
    }
    if (min_blocks < 1 || min_blocks > n) {
        throw InvalidParameter("min_blocks must lie in [1, N]");
    }
    // Restricted-growth string: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<std::size_t> a(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);
    while (true) {
        std::size_t blocks = prefix_max[n - 1] + 1;
        if (blocks >= min_blocks) {
            std::vector<ChannelSet> sets(blocks);
            for (std::size_t i = 0; i < n; ++i) {
                sets[a[i]] = sets[a[i]].with(i);
            }
            visit(Partition(std::move(sets)));
        }
        std::size_t i = n - 1;
        while (i > 0 && a[i] == prefix_max[i - 1] + 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++a[i];
        prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            a[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t min_blocks) {
    std::vector<Partition> out;
    for_each_partition(n, min_blocks, [&](const Partition &p) { out.push_back(p); });
    return out;
}

unsigned long long bell_number(std::size_t n) {
    if (n > 25) {
        throw InvalidParameter("bell_number supports n <= 25");
    }
    std::vector<unsigned long long> row = {1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<unsigned long long> next = {row.back()};
        for (unsigned long long v : row) {
            next.push_back(next.back() + v);
        }
        row = std::move(next);
    }
    return row.front();
}

Partition parse_partition(std::string_view text) {
    std::vector<std::vector<std::size_t>> blocks(1);
    if (text.empty()) {
        throw ParseError("empty partition string");
    }
    std::size_t pos = 0;
    while (true) {
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc() || ptr == text.data() + pos) {
            throw ParseError("partition '" + std::string(text) + "': expected a channel number at offset " +
                             std::to_string(pos));
        }
        if (value < 1 || value > kMaxChannels) {
            throw ParseError("partition '" + std::string(text) + "': channel " + std::to_string(value) +
                             " out of range");
        }
        blocks.back().push_back(value - 1);
        pos = static_cast<std::size_t>(ptr - text.data());
        if (pos == text.size()) {
            break;
        }
        char sep = text[pos++];
        if (sep == '|') {
            blocks.emplace_back();
        } else if (sep != ',') {
            throw ParseError("partition '" + std::string(text) + "': unexpected character '" + sep + "'");
        }
    }
    try {
        return canonical_partition(blocks);
    } catch (const InvalidParameter &e) {
        throw ParseError("partition '" + std::string(text) + "': " + e.what());
    }
}

std::string format_partition(const Partition &partition) {
    std::string out;
    for (ChannelSet b : partition.blocks()) {
        if (!out.empty()) {
            out += '|';
        }
        out += to_string(b);
    }
    return out;
}

Partition full_partition(std::size_t channels) {
    if (channels < 1 || channels > kMaxChannels) {
        throw InvalidParameter("full partition needs 1 to " + std::to_string(kMaxChannels) + " channels");
    }
    std::vector<ChannelSet> blocks;
    for (std::size_t c = 0; c < channels; ++c) {
        blocks.push_back(ChannelSet().with(c));
    }
    return Partition(std::move(blocks));
}

}  // namespace clickcert
