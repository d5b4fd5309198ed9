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

#include "clickcert/channels.h"

#include "clickcert/errors.h"

namespace clickcert {

ChannelSet::ChannelSet(std::initializer_list<std::size_t> channels) {
    for (std::size_t c : channels) {
        *this = with(c);
    }
}

ChannelSet ChannelSet::first(std::size_t n) {
    if (n > kMaxChannels) {
        throw InvalidParameter("channel count " + std::to_string(n) + " exceeds " + std::to_string(kMaxChannels));
    }
    return ChannelSet(n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
}

ChannelSet ChannelSet::with(std::size_t channel) const {
    if (channel >= kMaxChannels) {
        throw InvalidParameter("channel index " + std::to_string(channel + 1) + " out of range");
    }
    return ChannelSet(mask_ | (std::uint64_t{1} << channel));
}

std::vector<std::size_t> ChannelSet::indices() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    }
    return out;
}

std::string to_string(ChannelSet set) {
    std::string out;
    for (std::size_t c : set.indices()) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::to_string(c + 1);
    }
    return out;
}

}  // namespace clickcert
