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

// CLICKHIST 1 grammar, every line terminated by a single '\n':
//
//   CLICKHIST 1
//   channels <N>
//   pulses <P>
//   <pattern> <count>     (zero or more)
//
// <pattern> is N characters of '0'/'1' with channel 1 leftmost. Pattern lines are strictly
// ascending by the binary value of the string, counts are positive decimals without
// leading zeros, and the counts sum to P.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "clickcert/errors.h"
#include "clickcert/simulate.h"

namespace clickcert {

namespace {

/// Numeric value of the pattern string, channel 1 as the most significant bit.
std::uint64_t text_order(ClickPattern pattern, std::size_t channels) {
    std::uint64_t value = 0;
    for (std::size_t k = 0; k < channels; ++k) {
        value = (value << 1) | ((pattern >> k) & 1u);
    }
    return value;
}

[[noreturn]] void fail(std::size_t line, const std::string &message) {
    throw ParseError("CLICKHIST line " + std::to_string(line) + ": " + message);
}

std::uint64_t parse_decimal(std::string_view text, std::size_t line, const char *what) {
    if (text.empty()) {
        fail(line, std::string("missing ") + what);
    }
    if (text.size() > 1 && text[0] == '0') {
        fail(line, std::string(what) + " has leading zeros");
    }
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) {
        fail(line, std::string(what) + " overflows 64 bits");
    }
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(line, std::string("malformed ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

std::string_view expect_prefix(std::string_view line, std::string_view prefix, std::size_t number) {
    if (line.substr(0, prefix.size()) != prefix) {
        fail(number, "expected '" + std::string(prefix) + "'");
    }
    return line.substr(prefix.size());
}

}  // namespace

std::string format_dataset(const ClickDataset &dataset) {
    const std::size_t n = dataset.channels();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
    rows.reserve(dataset.histogram().size());
    for (const auto &[pattern, count] : dataset.histogram()) {
        rows.emplace_back(text_order(pattern, n), count);
    }
    std::sort(rows.begin(), rows.end());
    std::string out = "CLICKHIST 1\nchannels " + std::to_string(n) + "\npulses " + std::to_string(dataset.pulses()) + "\n";
    for (const auto &[order, count] : rows) {
        std::string text(n, '0');
        for (std::size_t k = 0; k < n; ++k) {
            if ((order >> (n - 1 - k)) & 1u) {
                text[k] = '1';
            }
        }
        out += text;
        out += ' ';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

ClickDataset parse_dataset(std::string_view text, std::optional<std::size_t> expected_channels) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            fail(lines.size() + 1, "missing trailing newline");
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    if (lines.size() < 3) {
        fail(lines.size() + 1, "truncated header");
    }
    if (lines[0] != "CLICKHIST 1") {
        fail(1, "expected 'CLICKHIST 1'");
    }
    std::uint64_t channels = parse_decimal(expect_prefix(lines[1], "channels ", 2), 2, "channel count");
    if (channels < 1 || channels > kMaxChannels) {
        fail(2, "channel count must lie in [1, " + std::to_string(kMaxChannels) + "]");
    }
    if (expected_channels && *expected_channels != channels) {
        fail(2, "dataset has " + std::to_string(channels) + " channels, expected " +
                    std::to_string(*expected_channels));
    }
    std::uint64_t pulses = parse_decimal(expect_prefix(lines[2], "pulses ", 3), 3, "pulse count");

    ClickDataset::Histogram histogram;
    std::uint64_t total = 0;
    std::optional<std::uint64_t> previous;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        std::size_t number = i + 1;
        std::size_t space = line.find(' ');
        if (space == std::string_view::npos) {
            fail(number, "expected '<pattern> <count>'");
        }
        std::string_view pattern_part = line.substr(0, space);
        if (pattern_part.size() != channels) {
            fail(number, "pattern has " + std::to_string(pattern_part.size()) + " characters but channels = " +
                             std::to_string(channels));
        }
        ClickPattern pattern = 0;
        std::uint64_t order = 0;
        for (std::size_t k = 0; k < pattern_part.size(); ++k) {
            char c = pattern_part[k];
            if (c != '0' && c != '1') {
                fail(number, "pattern characters must be '0' or '1'");
            }
            if (c == '1') {
                pattern |= ClickPattern{1} << k;
            }
            order = (order << 1) | static_cast<std::uint64_t>(c == '1');
        }
        if (previous && order <= *previous) {
            fail(number, "patterns must be strictly ascending");
        }
        previous = order;
        std::uint64_t count = parse_decimal(line.substr(space + 1), number, "count");
        if (count == 0) {
            fail(number, "zero counts are not stored");
        }
        if (total > std::numeric_limits<std::uint64_t>::max() - count) {
            fail(number, "counts overflow 64 bits");
        }
        total += count;
        histogram.emplace(pattern, count);
    }
    if (total != pulses) {
        fail(3, "counts sum to " + std::to_string(total) + " but pulses = " + std::to_string(pulses));
    }
    return ClickDataset(static_cast<std::size_t>(channels), pulses, std::move(histogram));
}

void write_dataset(const ClickDataset &dataset, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    std::string text = format_dataset(dataset);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

ClickDataset read_dataset(const std::filesystem::path &path, std::optional<std::size_t> expected_channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading '" + path.string() + "'");
    }
    return parse_dataset(buffer.str(), expected_channels);
}

}  // namespace clickcert
