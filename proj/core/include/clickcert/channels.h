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

#ifndef CLICKCERT_CHANNELS_H
#define CLICKCERT_CHANNELS_H

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace clickcert {

/// Upper bound on the number of detection channels supported anywhere.
inline constexpr std::size_t kMaxChannels = 32;

/// Click pattern of one pulse: bit k set means channel k (0-based) clicked.
using ClickPattern = std::uint64_t;

/// A set of 0-based channel indices, stored as a bit mask.
class ChannelSet {
   public:
    constexpr ChannelSet() = default;
    constexpr explicit ChannelSet(std::uint64_t mask) : mask_(mask) {}
    ChannelSet(std::initializer_list<std::size_t> channels);

    /// All channels 0..n-1.
    static ChannelSet first(std::size_t n);

    constexpr std::uint64_t mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
    constexpr bool contains(std::size_t channel) const {
        return channel < 64 && ((mask_ >> channel) & 1u) != 0;
    }
    /// Smallest channel index; requires !empty().
    constexpr std::size_t smallest() const { return static_cast<std::size_t>(std::countr_zero(mask_)); }
    /// One past the largest channel index (0 when empty).
    constexpr std::size_t span_end() const { return 64 - static_cast<std::size_t>(std::countl_zero(mask_)); }

    constexpr bool intersects(ChannelSet other) const { return (mask_ & other.mask_) != 0; }
    constexpr ChannelSet operator|(ChannelSet other) const { return ChannelSet(mask_ | other.mask_); }
    constexpr ChannelSet operator&(ChannelSet other) const { return ChannelSet(mask_ & other.mask_); }
    ChannelSet &operator|=(ChannelSet other) {
        mask_ |= other.mask_;
        return *this;
    }
    ChannelSet with(std::size_t channel) const;

    /// Channel indices in ascending order.
    std::vector<std::size_t> indices() const;

    /// True when no click pattern bit of this set is on.
    constexpr bool silent_in(ClickPattern pattern) const { return (pattern & mask_) == 0; }

    constexpr auto operator<=>(const ChannelSet &) const = default;

   private:
    std::uint64_t mask_ = 0;
};

/// "1,2,4" with 1-based indices.
std::string to_string(ChannelSet set);

}  // namespace clickcert

#endif
