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

#ifndef CLICKCERT_RNG_H
#define CLICKCERT_RNG_H

#include <array>
#include <cstdint>
#include <limits>

namespace clickcert {

/// Philox4x64-10 block function (Salmon et al., SC'11); matches the Random123 and NumPy
/// reference outputs.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key);

/// Stream purposes, placed in the top counter word so they never share blocks.
enum class StreamDomain : std::uint64_t {
    simulation = 0,
    bootstrap = 1,
};

/// Counter-based random stream.
///
/// Stream layout: key = (root seed, stream index), counter = (block, 0, 0, domain). Block
/// b yields four 64-bit outputs, consumed in order. Simulation uses stream index = global
/// chunk index; bootstrap uses stream index = resample index. Any stream can therefore be
/// regenerated independently of every other one.
///
/// Satisfies std::uniform_random_bit_generator.
class PhiloxStream {
   public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream, StreamDomain domain = StreamDomain::simulation);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (position_ == 4) {
            refill();
        }
        return buffer_[position_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

   private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 4> buffer_{};
    int position_ = 4;
};

}  // namespace clickcert

#endif
