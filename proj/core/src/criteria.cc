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

#include "clickcert/criteria.h"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <chrono>
#include <map>
#include <mutex>

#include "clickcert/format.h"

#include "clickcert/errors.h"

namespace clickcert {

struct MomentSource::Impl {
    Kind kind = Kind::analytic;
    std::optional<ClickDataset> dataset;
    std::optional<PhotonNumberDistribution> state;
    std::optional<SplittingConfig> splitting;
    std::optional<DetectorModel> detectors;
    mutable std::mutex mutex;
    mutable std::map<std::uint64_t, MomentEstimate> memo;
};

namespace {

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            words.push_back(text.substr(start, i - start));
        }
    }
    return words;
}

std::size_t parse_count(std::string_view word, std::string_view context) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
        throw ParseError("condition '" + std::string(context) + "': expected a positive integer, got '" +
                         std::string(word) + "'");
    }
    return value;
}

struct NamedEntry {
    std::string_view name;
    NamedCondition::Kind kind;
    bool ordered;
};

constexpr NamedEntry kNamed[] = {
    {"q_pb", NamedCondition::Kind::q_pb, false},
    {"q_b", NamedCondition::Kind::q_b, false},
    {"mandel_q", NamedCondition::Kind::mandel_q, false},
    {"matrix_of_moments", NamedCondition::Kind::matrix_of_moments, false},
    {"asymmetric", NamedCondition::Kind::asymmetric, true},
    {"multipartition", NamedCondition::Kind::multipartition, true},
};

std::string_view named_text(NamedCondition::Kind kind) {
    for (const auto &e : kNamed) {
        if (e.kind == kind) {
            return e.name;
        }
    }
    return "?";
}

void require_channels(ChannelSet set, std::size_t channels) {
    if (set.span_end() > channels) {
        throw InvalidParameter("condition references channel " + std::to_string(set.span_end()) +
                               " but the source has " + std::to_string(channels) + " channels");
    }
}

struct UniformSetup {
    double eta = 0.0;
    double nu = 0.0;
};

UniformSetup uniform_setup(const MomentSource &source, std::string_view what) {
    const SplittingConfig &s = *source.splitting();
    const DetectorModel &d = *source.detectors();
    if (!s.is_uniform() || !d.is_linear() || !d.is_uniform()) {
        throw InvalidParameter(std::string(what) + " needs equal splitting weights and identical linear detectors");
    }
    return {d.eta()[0] * (1.0 - s.loss_weight()), d.nu()[0]};
}

CriterionResult evaluate_named(const MomentSource &source, const NamedCondition &c, double threshold) {
    const std::size_t n = source.channels();
    const std::string label = format_condition(c);
    if (c.kind == NamedCondition::Kind::asymmetric || c.kind == NamedCondition::Kind::multipartition) {
        if (c.order < 3 || c.order > n) {
            throw InvalidParameter("condition '" + label + "' needs an order in [3, " + std::to_string(n) + "]");
        }
    }
    if (source.kind() == MomentSource::Kind::empirical) {
        const ClickDataset &data = *source.dataset();
        switch (c.kind) {
            case NamedCondition::Kind::q_pb:
                return q_pb(data, threshold);
            case NamedCondition::Kind::q_b:
                return q_b_estimate(data, threshold);
            case NamedCondition::Kind::matrix_of_moments:
                return matrix_of_moments_estimate(data, threshold);
            case NamedCondition::Kind::asymmetric:
                return asymmetric_estimate(data, c.order, threshold);
            case NamedCondition::Kind::multipartition:
                return multipartition_estimate(data, c.order, threshold);
            case NamedCondition::Kind::mandel_q:
                throw InvalidParameter("mandel_q needs photon-number statistics, i.e. an analytic source");
        }
    }
    const PhotonNumberDistribution &dist = *source.state();
    switch (c.kind) {
        case NamedCondition::Kind::q_pb:
            return analytic_result(label, q_pb(dist, *source.splitting(), *source.detectors()), threshold);
        case NamedCondition::Kind::mandel_q:
            return analytic_result(label, mandel_q(dist), threshold);
        case NamedCondition::Kind::q_b: {
            UniformSetup u = uniform_setup(source, label);
            return analytic_result(label, q_b(dist, n, u.eta, u.nu), threshold);
        }
        case NamedCondition::Kind::matrix_of_moments: {
            UniformSetup u = uniform_setup(source, label);
            return analytic_result(label, matrix_of_moments(dist, n, u.eta, u.nu).min_eigenvalue, threshold);
        }
        case NamedCondition::Kind::asymmetric: {
            UniformSetup u = uniform_setup(source, label);
            return analytic_result(label, asymmetric_condition(dist, n, u.eta, u.nu, c.order).asymmetric, threshold);
        }
        case NamedCondition::Kind::multipartition: {
            UniformSetup u = uniform_setup(source, label);
            return analytic_result(label, asymmetric_condition(dist, n, u.eta, u.nu, c.order).multipartition,
                                   threshold);
        }
    }
    throw std::logic_error("unhandled named condition");
}

std::vector<ChannelSet> touched_blocks(const Condition &condition) {
    std::vector<ChannelSet> blocks;
    if (const auto *p = std::get_if<Partition>(&condition)) {
        for (ChannelSet b : p->blocks()) {
            blocks.push_back(b);
        }
        if (p->size() > 1) {
            blocks.push_back(p->channels());
        }
    } else if (const auto *pair = std::get_if<PairCondition>(&condition)) {
        ChannelSet a = ChannelSet().with(pair->first);
        ChannelSet b = ChannelSet().with(pair->second);
        blocks = {a, b, a | b};
    }
    return blocks;
}

nlohmann::ordered_json json_number(double value) {
    if (!std::isfinite(value)) {
        return nullptr;
    }
    return value;
}

}  // namespace

MomentSource MomentSource::analytic(PhotonNumberDistribution state, SplittingConfig splitting,
                                    DetectorModel detectors) {
    if (splitting.channels() != detectors.channels()) {
        throw InvalidParameter("splitting has " + std::to_string(splitting.channels()) + " channels but detectors " +
                               std::to_string(detectors.channels()));
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::analytic;
    impl->state.emplace(std::move(state));
    impl->splitting.emplace(std::move(splitting));
    impl->detectors.emplace(std::move(detectors));
    return MomentSource(std::move(impl));
}

MomentSource MomentSource::empirical(ClickDataset dataset) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::empirical;
    impl->dataset.emplace(std::move(dataset));
    return MomentSource(std::move(impl));
}

MomentSource::Kind MomentSource::kind() const { return impl_->kind; }

std::size_t MomentSource::channels() const {
    return impl_->kind == Kind::empirical ? impl_->dataset->channels() : impl_->splitting->channels();
}

MomentEstimate MomentSource::block(ChannelSet block) const {
    if (block.empty()) {
        throw InvalidParameter("block moment of an empty block");
    }
    require_channels(block, channels());
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->memo.find(block.mask());
    if (it != impl_->memo.end()) {
        return it->second;
    }
    MomentEstimate m;
    if (impl_->kind == Kind::empirical) {
        m = block_moment(*impl_->dataset, block);
    } else {
        m.value = block_noclick(*impl_->state, *impl_->splitting, *impl_->detectors, block);
    }
    impl_->memo.emplace(block.mask(), m);
    return m;
}

const ClickDataset *MomentSource::dataset() const { return impl_->dataset ? &*impl_->dataset : nullptr; }
const PhotonNumberDistribution *MomentSource::state() const { return impl_->state ? &*impl_->state : nullptr; }
const SplittingConfig *MomentSource::splitting() const { return impl_->splitting ? &*impl_->splitting : nullptr; }
const DetectorModel *MomentSource::detectors() const { return impl_->detectors ? &*impl_->detectors : nullptr; }

std::string_view to_string(MomentSource::Kind kind) {
    return kind == MomentSource::Kind::analytic ? "analytic" : "empirical";
}

Condition parse_condition(std::string_view text) {
    std::vector<std::string_view> words = split_words(text);
    if (words.empty()) {
        throw ParseError("empty condition");
    }
    if (words[0] == "pair") {
        if (words.size() != 3) {
            throw ParseError("condition '" + std::string(text) + "': expected 'pair i j'");
        }
        std::size_t i = parse_count(words[1], text);
        std::size_t j = parse_count(words[2], text);
        if (i == 0 || j == 0 || i > kMaxChannels || j > kMaxChannels) {
            throw ParseError("condition '" + std::string(text) + "': channels are numbered from 1 to " +
                             std::to_string(kMaxChannels));
        }
        if (i == j) {
            throw ParseError("condition '" + std::string(text) + "': the two channels must differ");
        }
        return PairCondition{i - 1, j - 1};
    }
    for (const auto &e : kNamed) {
        if (words[0] != e.name) {
            continue;
        }
        if (e.ordered) {
            if (words.size() != 2) {
                throw ParseError("condition '" + std::string(text) + "': expected '" + std::string(e.name) + " k'");
            }
            return NamedCondition{e.kind, parse_count(words[1], text)};
        }
        if (words.size() != 1) {
            throw ParseError("condition '" + std::string(text) + "' takes no arguments");
        }
        return NamedCondition{e.kind, 0};
    }
    if (words.size() != 1) {
        throw ParseError("unrecognized condition '" + std::string(text) + "'");
    }
    return parse_partition(words[0]);
}

std::string format_condition(const Condition &condition) {
    if (const auto *p = std::get_if<Partition>(&condition)) {
        return format_partition(*p);
    }
    if (const auto *pair = std::get_if<PairCondition>(&condition)) {
        return "pair " + std::to_string(pair->first + 1) + " " + std::to_string(pair->second + 1);
    }
    const auto &named = std::get<NamedCondition>(condition);
    std::string out(named_text(named.kind));
    if (named.kind == NamedCondition::Kind::asymmetric || named.kind == NamedCondition::Kind::multipartition) {
        out += " " + std::to_string(named.order);
    }
    return out;
}

CriterionResult evaluate_condition(const MomentSource &source, const Condition &condition, double threshold) {
    const std::size_t n = source.channels();
    const bool analytic = source.kind() == MomentSource::Kind::analytic;
    if (const auto *p = std::get_if<Partition>(&condition)) {
        require_channels(p->channels(), n);
        if (analytic) {
            return analytic_result(format_partition(*p),
                                   partition_condition(*source.state(), *source.splitting(), *source.detectors(), *p),
                                   threshold);
        }
        return partition_estimate(*source.dataset(), *p, threshold);
    }
    if (const auto *pair = std::get_if<PairCondition>(&condition)) {
        if (pair->first == pair->second) {
            throw InvalidParameter("pair condition needs two distinct channels");
        }
        require_channels(ChannelSet().with(pair->first).with(pair->second), n);
        if (analytic) {
            return analytic_result(format_condition(condition),
                                   covariance_condition(*source.state(), *source.splitting(), *source.detectors(),
                                                        pair->first, pair->second),
                                   threshold);
        }
        return covariance_estimate(*source.dataset(), pair->first, pair->second, threshold);
    }
    return evaluate_named(source, std::get<NamedCondition>(condition), threshold);
}

CertificationReport certify(const MomentSource &source, const std::vector<Condition> &conditions, double threshold) {
    if (conditions.empty()) {
        throw InvalidParameter("certification needs at least one condition");
    }
    if (!(threshold > 0.0) || !std::isfinite(threshold)) {
        throw InvalidParameter("significance threshold must be positive and finite");
    }
    auto start = std::chrono::steady_clock::now();
    CertificationReport report;
    report.source = source.kind();
    report.channels = source.channels();
    report.pulses = source.dataset() ? source.dataset()->pulses() : 0;
    report.threshold = threshold;

    std::map<std::uint64_t, MomentEstimate> moments;
    for (const Condition &c : conditions) {
        report.results.push_back(evaluate_condition(source, c, threshold));
        for (ChannelSet b : touched_blocks(c)) {
            moments.emplace(b.mask(), source.block(b));
        }
    }
    for (const auto &[mask, m] : moments) {
        report.moments.push_back({ChannelSet(mask), m});
    }
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        const CriterionResult &r = report.results[i];
        if (!(r.significance > 0.0)) {
            continue;
        }
        if (!report.best_violation) {
            report.best_violation = i;
            continue;
        }
        const CriterionResult &best = report.results[*report.best_violation];
        if (r.significance > best.significance || (r.significance == best.significance && r.value < best.value)) {
            report.best_violation = i;
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<std::pair<Partition, CriterionResult>> rank_partitions(const MomentSource &source, std::size_t channels,
                                                                   double threshold) {
    if (channels < 2 || channels > kMaxRankChannels) {
        throw InvalidParameter("partition ranking covers 2 to " + std::to_string(kMaxRankChannels) + " channels");
    }
    if (channels > source.channels()) {
        throw InvalidParameter("ranking " + std::to_string(channels) + " channels but the source has " +
                               std::to_string(source.channels()));
    }
    std::vector<std::pair<Partition, CriterionResult>> ranked;
    for_each_partition(channels, 2, [&](const Partition &p) {
        ranked.emplace_back(p, evaluate_condition(source, p, threshold));
    });
    if (source.kind() == MomentSource::Kind::empirical) {
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
            return a.second.significance > b.second.significance;
        });
    } else {
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto &a, const auto &b) { return a.second.value < b.second.value; });
    }
    return ranked;
}

nlohmann::ordered_json result_json(const CriterionResult &result) {
    nlohmann::ordered_json j;
    j["label"] = result.label;
    j["value"] = json_number(result.value);
    j["stderr"] = json_number(result.std_error);
    j["significance"] = json_number(result.significance);
    j["verdict"] = std::string(to_string(result.verdict));
    return j;
}

std::string report_json(const CertificationReport &report) {
    nlohmann::ordered_json j;
    j["configuration"] = report.configuration;
    j["source"] = std::string(to_string(report.source));
    j["channels"] = report.channels;
    j["pulses"] = report.pulses;
    j["threshold"] = report.threshold;
    j["results"] = nlohmann::ordered_json::array();
    for (const auto &r : report.results) {
        j["results"].push_back(result_json(r));
    }
    j["moments"] = nlohmann::ordered_json::array();
    for (const auto &m : report.moments) {
        nlohmann::ordered_json e;
        e["block"] = to_string(m.block);
        e["value"] = json_number(m.moment.value);
        e["stderr"] = json_number(m.moment.std_error);
        j["moments"].push_back(e);
    }
    if (report.best_violation) {
        j["best_violation"] = report.results[*report.best_violation].label;
    } else {
        j["best_violation"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string report_csv(const CertificationReport &report) {
    std::string out = "label,value,stderr,significance,verdict\n";
    for (const auto &r : report.results) {
        out += csv_field(r.label) + "," + format_double(r.value) + "," + format_double(r.std_error) + "," +
               format_double(r.significance) + "," + std::string(to_string(r.verdict)) + "\n";
    }
    return out;
}

}  // namespace clickcert
