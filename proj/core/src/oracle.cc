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

#include "clickcert/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clickcert/errors.h"

namespace clickcert {

namespace {

void require_fits(ChannelSet channels, std::size_t n) {
    if (channels.span_end() > n) {
        throw InvalidParameter("block references channel " + std::to_string(channels.span_end()) +
                               " but the configuration has " + std::to_string(n));
    }
}

void require_compatible(const SplittingConfig &splitting, const DetectorModel &detectors) {
    if (splitting.channels() != detectors.channels()) {
        throw InvalidParameter("splitting has " + std::to_string(splitting.channels()) +
                               " channels but detectors describe " + std::to_string(detectors.channels()));
    }
}

/// E[prod_{k in block} q_k(n_k)] for each total photon number n, with photons routed
/// multinomially. Channels are peeled off one binomial split at a time.
double routed_noclick(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                      const DetectorModel &detectors, ChannelSet block) {
    const std::size_t n_max = dist.max_photons();
    if (detectors.table_reach() < n_max) {
        throw InvalidParameter("tabulated detector response does not reach photon number " +
                               std::to_string(n_max));
    }
    std::vector<double> log_fact(n_max + 1, 0.0);
    for (std::size_t i = 1; i <= n_max; ++i) {
        log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));
    }
    std::vector<std::size_t> channels = block.indices();
    double remaining = 1.0;
    for (std::size_t c : channels) {
        remaining -= splitting.weight(c);
    }
    // g(r): expected silent probability of the not-yet-processed block channels given r
    // photons shared between them and everything outside the block.
    std::vector<double> g(n_max + 1, 1.0);
    for (auto it = channels.rbegin(); it != channels.rend(); ++it) {
        double w = splitting.weight(*it);
        remaining += w;
        double s = remaining > 0.0 ? std::clamp(w / remaining, 0.0, 1.0) : 0.0;
        std::vector<double> next(n_max + 1, 0.0);
        for (std::size_t r = 0; r <= n_max; ++r) {
            double total = 0.0;
            if (s == 0.0) {
                total = detectors.noclick_probability(*it, 0) * g[r];
            } else if (s == 1.0) {
                total = detectors.noclick_probability(*it, r) * g[0];
            } else {
                double log_s = std::log(s);
                double log_1ms = std::log1p(-s);
                for (std::size_t t = 0; t <= r; ++t) {
                    double log_binom = log_fact[r] - log_fact[t] - log_fact[r - t] +
                                       static_cast<double>(t) * log_s + static_cast<double>(r - t) * log_1ms;
                    total += std::exp(log_binom) * detectors.noclick_probability(*it, t) * g[r - t];
                }
            }
            next[r] = total;
        }
        g = std::move(next);
    }
    double total = 0.0;
    auto probs = dist.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) {
        total += probs[n] * g[n];
    }
    return total;
}

double absorbed_fraction(ChannelSet block, const SplittingConfig &splitting, const DetectorModel &detectors) {
    double lambda = 0.0;
    for (std::size_t c : block.indices()) {
        lambda += detectors.eta()[c] * splitting.weight(c);
    }
    return std::clamp(lambda, 0.0, 1.0);
}

}  // namespace

DetectorModel DetectorModel::linear(std::vector<double> eta, std::vector<double> nu) {
    if (eta.empty() || eta.size() != nu.size()) {
        throw InvalidParameter("detector model needs matching, non-empty eta and nu lists");
    }
    if (eta.size() > kMaxChannels) {
        throw InvalidParameter("detector model has too many channels");
    }
    for (std::size_t k = 0; k < eta.size(); ++k) {
        if (!std::isfinite(eta[k]) || eta[k] < 0.0 || eta[k] > 1.0) {
            throw InvalidParameter("detector efficiency must lie in [0, 1]");
        }
        if (!std::isfinite(nu[k]) || nu[k] < 0.0) {
            throw InvalidParameter("dark-count rate must be finite and non-negative");
        }
    }
    DetectorModel model;
    model.channels_ = eta.size();
    model.eta_ = std::move(eta);
    model.nu_ = std::move(nu);
    return model;
}

DetectorModel DetectorModel::uniform(std::size_t channels, double eta, double nu) {
    return linear(std::vector<double>(channels, eta), std::vector<double>(channels, nu));
}

DetectorModel DetectorModel::tabulated(std::vector<std::vector<double>> noclick) {
    if (noclick.empty() || noclick.size() > kMaxChannels) {
        throw InvalidParameter("tabulated detector model needs 1 to 32 channels");
    }
    for (const auto &row : noclick) {
        if (row.empty()) {
            throw InvalidParameter("tabulated response needs at least the zero-photon entry");
        }
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (!std::isfinite(row[n]) || row[n] < 0.0 || row[n] > 1.0) {
                throw InvalidParameter("tabulated no-click probabilities must lie in [0, 1]");
            }
            if (n > 0 && row[n] > row[n - 1]) {
                throw InvalidParameter("tabulated no-click probabilities must be non-increasing");
            }
        }
    }
    DetectorModel model;
    model.channels_ = noclick.size();
    model.table_ = std::move(noclick);
    return model;
}

bool DetectorModel::is_uniform() const {
    if (!is_linear()) {
        return false;
    }
    for (std::size_t k = 1; k < channels_; ++k) {
        if (eta_[k] != eta_[0] || nu_[k] != nu_[0]) {
            return false;
        }
    }
    return true;
}

double DetectorModel::noclick_probability(std::size_t channel, std::size_t photons) const {
    if (!is_linear()) {
        const auto &row = table_.at(channel);
        if (photons >= row.size()) {
            throw InvalidParameter("tabulated detector response does not reach photon number " +
                                   std::to_string(photons));
        }
        return row[photons];
    }
    double silent = std::exp(-nu_.at(channel));
    if (photons == 0) {
        return silent;
    }
    return silent * std::pow(1.0 - eta_[channel], static_cast<double>(photons));
}

std::size_t DetectorModel::table_reach() const {
    if (is_linear()) {
        return std::numeric_limits<std::size_t>::max();
    }
    std::size_t reach = std::numeric_limits<std::size_t>::max();
    for (const auto &row : table_) {
        reach = std::min(reach, row.size() - 1);
    }
    return reach;
}

EffectiveAbsorption effective_absorption(ChannelSet block, const SplittingConfig &splitting,
                                         const DetectorModel &detectors) {
    require_compatible(splitting, detectors);
    if (block.empty()) {
        throw InvalidParameter("effective absorption of an empty block");
    }
    require_fits(block, splitting.channels());
    if (!detectors.is_linear()) {
        throw InvalidParameter("effective absorption requires a linear detector response");
    }
    EffectiveAbsorption out;
    out.lambda = absorbed_fraction(block, splitting, detectors);
    for (std::size_t c : block.indices()) {
        out.nu_sum += detectors.nu()[c];
    }
    return out;
}

double noclick_moment(const PhotonNumberDistribution &dist, EffectiveAbsorption absorption) {
    return std::exp(-absorption.nu_sum) * dist.generating_function(absorption.lambda);
}

double block_noclick(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                     const DetectorModel &detectors, ChannelSet block) {
    require_compatible(splitting, detectors);
    require_fits(block, splitting.channels());
    if (block.empty()) {
        return 1.0;
    }
    if (detectors.is_linear()) {
        return noclick_moment(dist, effective_absorption(block, splitting, detectors));
    }
    return routed_noclick(dist, splitting, detectors, block);
}

double noise_free_condition(const PhotonNumberDistribution &dist, std::span<const double> block_absorptions,
                            double joint_absorption) {
    double joint_silent = dist.generating_function(joint_absorption);
    double joint_click = dist.generating_complement(joint_absorption);
    if (joint_silent <= joint_click) {
        double product = 1.0;
        for (double lambda : block_absorptions) {
            product *= dist.generating_function(lambda);
        }
        return joint_silent - product;
    }
    // 1 - prod(1 - c_J), accumulated as d + c (1 - d) so nothing is subtracted from one.
    double any_click = 0.0;
    for (double lambda : block_absorptions) {
        double c = dist.generating_complement(lambda);
        any_click += c * (1.0 - any_click);
    }
    return any_click - joint_click;
}

double block_click(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                   const DetectorModel &detectors, ChannelSet block) {
    require_compatible(splitting, detectors);
    require_fits(block, splitting.channels());
    if (block.empty()) {
        return 0.0;
    }
    if (!detectors.is_linear()) {
        return 1.0 - routed_noclick(dist, splitting, detectors, block);
    }
    EffectiveAbsorption a = effective_absorption(block, splitting, detectors);
    return -std::expm1(-a.nu_sum) + std::exp(-a.nu_sum) * dist.generating_complement(a.lambda);
}

double partition_condition(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                           const DetectorModel &detectors, const Partition &partition) {
    require_compatible(splitting, detectors);
    if (partition.size() == 0) {
        throw InvalidParameter("partition needs at least one block");
    }
    ChannelSet all = partition.channels();
    require_fits(all, splitting.channels());
    if (partition.size() == 1) {
        return 0.0;
    }
    if (!detectors.is_linear()) {
        double product = 1.0;
        for (ChannelSet b : partition.blocks()) {
            product *= routed_noclick(dist, splitting, detectors, b);
        }
        return routed_noclick(dist, splitting, detectors, all) - product;
    }

    std::vector<double> lambdas;
    lambdas.reserve(partition.size());
    for (ChannelSet b : partition.blocks()) {
        lambdas.push_back(absorbed_fraction(b, splitting, detectors));
    }
    double noise_free = noise_free_condition(dist, lambdas, absorbed_fraction(all, splitting, detectors));
    double nu_sum = 0.0;
    for (std::size_t c : all.indices()) {
        nu_sum += detectors.nu()[c];
    }
    return std::exp(-nu_sum) * noise_free;
}

double covariance_condition(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                            const DetectorModel &detectors, std::size_t i, std::size_t j) {
    if (i == j) {
        throw InvalidParameter("covariance condition needs two distinct channels");
    }
    return partition_condition(dist, splitting, detectors,
                               Partition({ChannelSet().with(i), ChannelSet().with(j)}));
}

double photon_number_covariance(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                                const DetectorModel &detectors, std::size_t i, std::size_t j) {
    if (i == j) {
        throw InvalidParameter("photon-number covariance needs two distinct channels");
    }
    require_compatible(splitting, detectors);
    require_fits(ChannelSet().with(i).with(j), splitting.channels());
    if (!detectors.is_linear()) {
        throw InvalidParameter("photon-number covariance requires a linear detector response");
    }
    double mean = dist.factorial_moment(1);
    double second = dist.factorial_moment(2);
    double scale = detectors.eta()[i] * splitting.weight(i) * detectors.eta()[j] * splitting.weight(j);
    return scale * (second - mean * mean);
}

SplittingConfig fig2_splitting() { return SplittingConfig::make({0.7, 0.3}); }

DetectorModel fig2_detectors() { return DetectorModel::uniform(2, 0.7, 0.0); }

std::vector<Fig2Row> fig2_curves(std::size_t added, std::span<const double> nbar_grid) {
    if (added != 1 && added != 2) {
        throw InvalidParameter("photon-added curves are defined for 1 or 2 added photons");
    }
    if (nbar_grid.empty()) {
        throw InvalidParameter("nbar grid must not be empty");
    }
    SplittingConfig splitting = fig2_splitting();
    DetectorModel detectors = fig2_detectors();
    std::vector<Fig2Row> rows;
    rows.reserve(nbar_grid.size());
    for (double nbar : nbar_grid) {
        PhotonNumberDistribution dist = photon_added_thermal(added, nbar);
        rows.push_back({nbar, covariance_condition(dist, splitting, detectors, 0, 1),
                        photon_number_covariance(dist, splitting, detectors, 0, 1)});
    }
    return rows;
}

double fig2_crossing(std::size_t added, Fig2Curve curve, double lo, double hi, double tolerance) {
    SplittingConfig splitting = fig2_splitting();
    DetectorModel detectors = fig2_detectors();
    auto value = [&](double nbar) {
        PhotonNumberDistribution dist = photon_added_thermal(added, nbar);
        return curve == Fig2Curve::noclick_covariance ? covariance_condition(dist, splitting, detectors, 0, 1)
                                                      : photon_number_covariance(dist, splitting, detectors, 0, 1);
    };
    if (!(lo < hi) || !(tolerance > 0.0)) {
        throw InvalidParameter("crossing search needs lo < hi and a positive tolerance");
    }
    if (!(value(lo) < 0.0) || value(hi) < 0.0) {
        throw InvalidParameter("crossing search interval does not bracket a sign change");
    }
    while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        (value(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace clickcert
