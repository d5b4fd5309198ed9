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

#include "clickcert/simulate.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "clickcert/errors.h"
#include "clickcert/rng.h"

namespace clickcert {

namespace {

/// Dense per-pattern counters up to this many channels; sparse maps beyond.
constexpr std::size_t kDenseChannels = 16;

class Accumulator {
   public:
    explicit Accumulator(std::size_t channels) : channels_(channels) {
        if (channels_ <= kDenseChannels) {
            dense_.assign(std::size_t{1} << channels_, 0);
        }
    }

    void add(ClickPattern pattern) {
        if (!dense_.empty()) {
            ++dense_[pattern];
        } else {
            ++sparse_[pattern];
        }
    }

    void absorb(const Accumulator &other) {
        for (std::size_t p = 0; p < other.dense_.size(); ++p) {
            dense_[p] += other.dense_[p];
        }
        for (const auto &[pattern, count] : other.sparse_) {
            sparse_[pattern] += count;
        }
    }

    ClickDataset::Histogram histogram() const {
        ClickDataset::Histogram out = sparse_;
        for (std::size_t p = 0; p < dense_.size(); ++p) {
            if (dense_[p] != 0) {
                out.emplace(static_cast<ClickPattern>(p), dense_[p]);
            }
        }
        return out;
    }

   private:
    std::size_t channels_;
    std::vector<std::uint64_t> dense_;
    ClickDataset::Histogram sparse_;
};

/// Precomputed sampling tables shared read-only by all workers.
struct PulseSampler {
    std::vector<double> photon_cdf;
    std::vector<double> route_cdf;               // one entry per channel; remainder is loss
    std::vector<std::vector<double>> silent;     // silent[k][n] = q_k(n)
    std::size_t channels = 0;

    explicit PulseSampler(const SimulationPlan &plan) : channels(plan.splitting.channels()) {
        auto probs = plan.state.probs();
        double acc = 0.0;
        for (double p : probs) {
            acc += p;
            photon_cdf.push_back(acc);
        }
        acc = 0.0;
        for (double w : plan.splitting.weights()) {
            acc += w;
            route_cdf.push_back(acc);
        }
        if (plan.splitting.loss_weight() == 0.0) {
            // Every photon lands in some channel even if the weights round short of 1.
            route_cdf.back() = std::numeric_limits<double>::infinity();
        }
        std::size_t n_max = plan.state.max_photons();
        silent.resize(channels);
        for (std::size_t k = 0; k < channels; ++k) {
            for (std::size_t n = 0; n <= n_max; ++n) {
                silent[k].push_back(plan.detectors.noclick_probability(k, n));
            }
        }
    }

    std::size_t draw_photons(PhiloxStream &rng) const {
        double u = rng.uniform();
        if (u < photon_cdf[0]) {
            return 0;
        }
        auto it = std::upper_bound(photon_cdf.begin(), photon_cdf.end(), u);
        if (it == photon_cdf.end()) {
            return photon_cdf.size() - 1;
        }
        return static_cast<std::size_t>(it - photon_cdf.begin());
    }

    ClickPattern draw_pulse(PhiloxStream &rng, std::vector<std::size_t> &occupancy) const {
        std::size_t photons = draw_photons(rng);
        std::fill(occupancy.begin(), occupancy.end(), 0);
        for (std::size_t i = 0; i < photons; ++i) {
            double u = rng.uniform();
            for (std::size_t k = 0; k < channels; ++k) {
                if (u < route_cdf[k]) {
                    ++occupancy[k];
                    break;
                }
            }
        }
        ClickPattern pattern = 0;
        for (std::size_t k = 0; k < channels; ++k) {
            double q = silent[k][occupancy[k]];
            bool click;
            if (q >= 1.0) {
                click = false;
            } else if (q <= 0.0) {
                click = true;
            } else {
                click = rng.uniform() >= q;
            }
            if (click) {
                pattern |= ClickPattern{1} << k;
            }
        }
        return pattern;
    }
};

}  // namespace

ClickDataset::ClickDataset(std::size_t channels, std::uint64_t pulses, Histogram histogram)
    : channels_(channels), pulses_(pulses), histogram_(std::move(histogram)) {
    if (channels_ < 1 || channels_ > kMaxChannels) {
        throw InvalidParameter("dataset channel count must lie in [1, " + std::to_string(kMaxChannels) + "]");
    }
    std::uint64_t total = 0;
    for (auto it = histogram_.begin(); it != histogram_.end();) {
        if ((it->first >> channels_) != 0) {
            throw InvalidParameter("click pattern exceeds the dataset's channel count");
        }
        if (it->second == 0) {
            it = histogram_.erase(it);
            continue;
        }
        if (total > std::numeric_limits<std::uint64_t>::max() - it->second) {
            throw InvalidParameter("dataset counts overflow 64 bits");
        }
        total += it->second;
        ++it;
    }
    if (total != pulses_) {
        throw InvalidParameter("dataset counts sum to " + std::to_string(total) + " but pulses = " +
                               std::to_string(pulses_));
    }
}

std::uint64_t ClickDataset::count(ClickPattern pattern) const {
    auto it = histogram_.find(pattern);
    return it == histogram_.end() ? 0 : it->second;
}

std::uint64_t ClickDataset::silent_count(ChannelSet block) const {
    std::uint64_t silent = 0;
    for (const auto &[pattern, count] : histogram_) {
        if (block.silent_in(pattern)) {
            silent += count;
        }
    }
    return silent;
}

double ClickDataset::mean_clicks() const {
    if (pulses_ == 0) {
        return 0.0;
    }
    long double clicks = 0.0L;
    for (const auto &[pattern, count] : histogram_) {
        clicks += static_cast<long double>(std::popcount(pattern)) * count;
    }
    return static_cast<double>(clicks / pulses_);
}

void SimulationPlan::validate() const {
    if (pulses < 1) {
        throw InvalidParameter("simulation needs at least one pulse");
    }
    if (chunk_size < 1) {
        throw InvalidParameter("chunk size must be at least 1");
    }
    if (splitting.channels() != detectors.channels()) {
        throw InvalidParameter("splitting and detector channel counts differ");
    }
    if (detectors.table_reach() < state.max_photons()) {
        throw InvalidParameter("tabulated detector response does not cover the state's photon numbers");
    }
    std::uint64_t chunks = (pulses - 1) / chunk_size + 1;
    if (first_chunk > std::numeric_limits<std::uint64_t>::max() - chunks) {
        throw InvalidParameter("chunk index range overflows");
    }
}

ClickDataset sample_dataset(const SimulationPlan &plan, unsigned threads) {
    plan.validate();
    const PulseSampler sampler(plan);
    const std::size_t channels = plan.splitting.channels();
    const std::uint64_t chunks = (plan.pulses - 1) / plan.chunk_size + 1;
    const unsigned workers = static_cast<unsigned>(
        std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, chunks));

    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<Accumulator> partial(workers, Accumulator(channels));
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](unsigned worker) {
        try {
            std::vector<std::size_t> occupancy(channels);
            for (std::uint64_t c = next_chunk++; c < chunks; c = next_chunk++) {
                PhiloxStream rng(plan.seed, plan.first_chunk + c, StreamDomain::simulation);
                std::uint64_t begin = c * plan.chunk_size;
                std::uint64_t end = std::min(plan.pulses, begin + plan.chunk_size);
                for (std::uint64_t p = begin; p < end; ++p) {
                    partial[worker].add(sampler.draw_pulse(rng, occupancy));
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            failure = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    for (unsigned w = 1; w < workers; ++w) {
        partial[0].absorb(partial[w]);
    }
    return ClickDataset(channels, plan.pulses, partial[0].histogram());
}

ClickDataset merge(std::span<const ClickDataset> datasets) {
    if (datasets.empty()) {
        throw InvalidParameter("merge needs at least one dataset");
    }
    std::size_t channels = datasets.front().channels();
    std::uint64_t pulses = 0;
    ClickDataset::Histogram histogram;
    for (const auto &d : datasets) {
        if (d.channels() != channels) {
            throw InvalidParameter("cannot merge datasets with " + std::to_string(channels) + " and " +
                                   std::to_string(d.channels()) + " channels");
        }
        if (pulses > std::numeric_limits<std::uint64_t>::max() - d.pulses()) {
            throw InvalidParameter("merged pulse count overflows 64 bits");
        }
        pulses += d.pulses();
        for (const auto &[pattern, count] : d.histogram()) {
            histogram[pattern] += count;
        }
    }
    return ClickDataset(channels, pulses, std::move(histogram));
}

}  // namespace clickcert
