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

#include "clickcert/estimate.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "clickcert/errors.h"
#include "clickcert/rng.h"

namespace clickcert {
namespace {

// Mean vector and population covariance of per-pulse statistics.
struct PulseStatistics {
    std::vector<double> mean;
    std::vector<double> cov;  // row-major, dimension mean.size()
    std::uint64_t pulses = 0;

    double at(std::size_t a, std::size_t b) const { return cov[a * mean.size() + b]; }
};

using StatisticFn = std::function<void(ClickPattern, std::vector<double> &)>;

void require_pulses(const ClickDataset &dataset) {
    if (dataset.pulses() == 0) {
        throw InvalidParameter("cannot estimate moments from an empty dataset");
    }
}

void require_fits(ChannelSet set, const ClickDataset &dataset) {
    if (set.span_end() > dataset.channels()) {
        throw InvalidParameter("channel set {" + to_string(set) + "} exceeds the dataset's " +
                               std::to_string(dataset.channels()) + " channels");
    }
}

// Two passes over the histogram so the covariance is not formed by cancellation.
PulseStatistics pulse_statistics(const ClickDataset &dataset, std::size_t dimension, const StatisticFn &fn) {
    require_pulses(dataset);
    PulseStatistics out;
    out.pulses = dataset.pulses();
    out.mean.assign(dimension, 0.0);
    out.cov.assign(dimension * dimension, 0.0);
    const double total = static_cast<double>(dataset.pulses());

    std::vector<std::pair<double, std::vector<double>>> rows;
    rows.reserve(dataset.histogram().size());
    for (const auto &[pattern, count] : dataset.histogram()) {
        std::vector<double> f(dimension, 0.0);
        fn(pattern, f);
        double weight = static_cast<double>(count) / total;
        for (std::size_t a = 0; a < dimension; ++a) {
            out.mean[a] += weight * f[a];
        }
        rows.emplace_back(weight, std::move(f));
    }
    for (const auto &[weight, f] : rows) {
        for (std::size_t a = 0; a < dimension; ++a) {
            double da = f[a] - out.mean[a];
            for (std::size_t b = a; b < dimension; ++b) {
                out.cov[a * dimension + b] += weight * da * (f[b] - out.mean[b]);
            }
        }
    }
    for (std::size_t a = 0; a < dimension; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            out.cov[a * dimension + b] = out.cov[b * dimension + a];
        }
    }
    return out;
}

double quadratic_form(const PulseStatistics &s, const std::vector<double> &g) {
    double acc = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = 0; b < g.size(); ++b) {
            acc += g[a] * s.at(a, b) * g[b];
        }
    }
    return acc;
}

// First-order delta method with a central-difference gradient.
double numeric_delta_error(const PulseStatistics &s, const std::function<double(const std::vector<double> &)> &fn) {
    std::vector<double> x = s.mean;
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double h = 1e-6 * std::max(1e-3, std::abs(x[a]));
        double keep = x[a];
        x[a] = keep + h;
        double up = fn(x);
        x[a] = keep - h;
        double down = fn(x);
        x[a] = keep;
        g[a] = (up - down) / (2.0 * h);
    }
    double variance = quadratic_form(s, g) / static_cast<double>(s.pulses);
    return std::sqrt(std::max(0.0, variance));
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return out;
}

// S_k = mean over pulses of C(z, k) / C(N, k), z the number of silent channels. This is
// the average no-click frequency over all k-channel blocks.
PulseStatistics symmetric_statistics(const ClickDataset &dataset) {
    const std::size_t n = dataset.channels();
    std::vector<double> norm(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        norm[k] = binomial(n, k);
    }
    const ClickPattern all = ChannelSet::first(n).mask();
    return pulse_statistics(dataset, n, [&](ClickPattern pattern, std::vector<double> &f) {
        std::size_t silent = n - static_cast<std::size_t>(std::popcount(pattern & all));
        for (std::size_t k = 1; k <= n; ++k) {
            f[k - 1] = binomial(silent, k) / norm[k];
        }
    });
}

void require_uniform_args(std::size_t channels, double eta, double nu) {
    if (channels < 2) {
        throw InvalidParameter("equal-channel criteria need at least 2 channels");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw InvalidParameter("detector efficiency must lie in [0, 1]");
    }
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        throw InvalidParameter("dark rate must be finite and non-negative");
    }
}

double uniform_absorption(std::size_t channels, double eta, std::size_t k) {
    return static_cast<double>(k) * eta / static_cast<double>(channels);
}

double q_b_from(std::size_t n, double m1, double m2) {
    double denom = m1 * (1.0 - m1);
    if (!(denom > 0.0)) {
        throw InvalidParameter("sub-binomial parameter undefined: deterministic no-click events");
    }
    return static_cast<double>(n - 1) * (m2 - m1 * m1) / denom;
}

std::vector<double> moment_matrix_entries(const std::vector<double> &powers, std::size_t dimension) {
    std::vector<double> entries(dimension * dimension);
    for (std::size_t a = 0; a < dimension; ++a) {
        for (std::size_t b = 0; b < dimension; ++b) {
            entries[a * dimension + b] = powers[a + b];
        }
    }
    return entries;
}

void require_order(std::size_t channels, std::size_t k) {
    if (k < 3 || k > channels) {
        throw InvalidParameter("condition order " + std::to_string(k) + " must lie in [3, " +
                               std::to_string(channels) + "]");
    }
}

double partition_value(const std::vector<double> &mean) {
    double product = 1.0;
    for (std::size_t j = 1; j < mean.size(); ++j) {
        product *= mean[j];
    }
    return mean[0] - product;
}

PulseStatistics partition_statistics(const ClickDataset &dataset, const Partition &partition) {
    std::vector<ChannelSet> sets;
    sets.push_back(partition.channels());
    for (ChannelSet b : partition.blocks()) {
        sets.push_back(b);
    }
    return pulse_statistics(dataset, sets.size(), [&](ClickPattern pattern, std::vector<double> &f) {
        for (std::size_t a = 0; a < sets.size(); ++a) {
            f[a] = sets[a].silent_in(pattern) ? 1.0 : 0.0;
        }
    });
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    return verdict == Verdict::nonclassical ? "nonclassical" : "inconclusive";
}

CriterionResult empirical_result(std::string label, double value, double std_error, double threshold) {
    CriterionResult r;
    r.label = std::move(label);
    r.value = value;
    r.std_error = std_error;
    r.significance = (value < 0.0 && std_error > 0.0) ? -value / std_error : 0.0;
    r.verdict = r.significance >= threshold ? Verdict::nonclassical : Verdict::inconclusive;
    return r;
}

CriterionResult analytic_result(std::string label, double value, double threshold) {
    CriterionResult r;
    r.label = std::move(label);
    r.value = value;
    r.std_error = 0.0;
    r.significance = value < -kClassicalSlack ? std::numeric_limits<double>::infinity() : 0.0;
    r.verdict = r.significance >= threshold ? Verdict::nonclassical : Verdict::inconclusive;
    return r;
}

MomentEstimate block_moment(const ClickDataset &dataset, ChannelSet block) {
    if (block.empty()) {
        throw InvalidParameter("block moment of an empty block");
    }
    require_fits(block, dataset);
    require_pulses(dataset);
    MomentEstimate out;
    out.pulses = dataset.pulses();
    double p = static_cast<double>(dataset.silent_count(block)) / static_cast<double>(dataset.pulses());
    out.value = p;
    out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(dataset.pulses()));
    return out;
}

CriterionResult partition_estimate(const ClickDataset &dataset, const Partition &partition, double threshold) {
    if (partition.size() == 0) {
        throw InvalidParameter("partition needs at least one block");
    }
    require_fits(partition.channels(), dataset);
    require_pulses(dataset);
    std::string label = format_partition(partition);
    if (partition.size() == 1) {
        return empirical_result(std::move(label), 0.0, 0.0, threshold);
    }
    PulseStatistics s = partition_statistics(dataset, partition);
    const std::size_t k = partition.size();
    const std::size_t d = k + 1;
    auto product_except = [&](std::size_t skip_a, std::size_t skip_b) {
        double p = 1.0;
        for (std::size_t j = 1; j < d; ++j) {
            if (j != skip_a && j != skip_b) {
                p *= s.mean[j];
            }
        }
        return p;
    };

    std::vector<double> grad(d, 0.0);
    grad[0] = 1.0;
    for (std::size_t j = 1; j < d; ++j) {
        grad[j] = -product_except(j, j);
    }
    std::vector<double> hess(d * d, 0.0);
    for (std::size_t a = 1; a < d; ++a) {
        for (std::size_t b = 1; b < d; ++b) {
            if (a != b) {
                hess[a * d + b] = -product_except(a, b);
            }
        }
    }
    // tr((H S)^2) = sum_{a,b} (HS)_ab (HS)_ba
    std::vector<double> hs(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                acc += hess[a * d + c] * s.at(c, b);
            }
            hs[a * d + b] = acc;
        }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            trace += hs[a * d + b] * hs[b * d + a];
        }
    }
    const double p = static_cast<double>(s.pulses);
    double variance = quadratic_form(s, grad) / p + 0.5 * trace / (p * p);
    return empirical_result(std::move(label), partition_value(s.mean), std::sqrt(std::max(0.0, variance)),
                            threshold);
}

CriterionResult covariance_estimate(const ClickDataset &dataset, std::size_t i, std::size_t j, double threshold) {
    if (i == j) {
        throw InvalidParameter("covariance estimate needs two distinct channels");
    }
    CriterionResult r =
        partition_estimate(dataset, Partition({ChannelSet().with(i), ChannelSet().with(j)}), threshold);
    r.label = "pair " + std::to_string(i + 1) + " " + std::to_string(j + 1);
    return r;
}

double q_pb(const PhotonNumberDistribution &dist, const SplittingConfig &splitting, const DetectorModel &detectors) {
    const std::size_t n = splitting.channels();
    if (n < 2) {
        throw InvalidParameter("sub-Poisson-binomial parameter needs at least 2 channels");
    }
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ChannelSet single = ChannelSet().with(i);
        denominator += block_noclick(dist, splitting, detectors, single) * block_click(dist, splitting, detectors, single);
        for (std::size_t j = i + 1; j < n; ++j) {
            numerator += 2.0 * covariance_condition(dist, splitting, detectors, i, j);
        }
    }
    if (!(denominator > 0.0)) {
        throw InvalidParameter("sub-Poisson-binomial parameter undefined: deterministic no-click events");
    }
    return numerator / denominator;
}

CriterionResult q_pb(const ClickDataset &dataset, double threshold) {
    const std::size_t n = dataset.channels();
    if (n < 2) {
        throw InvalidParameter("sub-Poisson-binomial parameter needs at least 2 channels");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    PulseStatistics s = pulse_statistics(dataset, n + pairs.size(), [&](ClickPattern pattern, std::vector<double> &f) {
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = ((pattern >> i) & 1u) == 0 ? 1.0 : 0.0;
        }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            f[n + p] = f[pairs[p].first] * f[pairs[p].second];
        }
    });
    auto parts = [&](const std::vector<double> &x) {
        double a = 0.0;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            a += 2.0 * (x[n + p] - x[pairs[p].first] * x[pairs[p].second]);
        }
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            b += x[i] * (1.0 - x[i]);
        }
        return std::pair{a, b};
    };
    auto [a, b] = parts(s.mean);
    if (!(b > 0.0)) {
        throw InvalidParameter("sub-Poisson-binomial parameter undefined: deterministic no-click events");
    }
    std::vector<double> grad(s.mean.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += s.mean[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = -2.0 * (total - s.mean[i]) / b - a * (1.0 - 2.0 * s.mean[i]) / (b * b);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        grad[n + p] = 2.0 / b;
    }
    double variance = quadratic_form(s, grad) / static_cast<double>(s.pulses);
    return empirical_result("q_pb", a / b, std::sqrt(std::max(0.0, variance)), threshold);
}

double uniform_noclick_power(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu,
                             std::size_t k) {
    require_uniform_args(channels, eta, nu);
    if (k > channels) {
        throw InvalidParameter("no-click power exceeds the channel count");
    }
    if (k == 0) {
        return 1.0;
    }
    return std::exp(-static_cast<double>(k) * nu) * dist.generating_function(uniform_absorption(channels, eta, k));
}

double q_b(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu) {
    require_uniform_args(channels, eta, nu);
    const double a = uniform_absorption(channels, eta, 1);
    const double pair[] = {a, a};
    double variance = std::exp(-2.0 * nu) * noise_free_condition(dist, pair, uniform_absorption(channels, eta, 2));
    double silent = std::exp(-nu) * dist.generating_function(a);
    double click = -std::expm1(-nu) + std::exp(-nu) * dist.generating_complement(a);
    double denom = silent * click;
    if (!(denom > 0.0)) {
        throw InvalidParameter("sub-binomial parameter undefined: deterministic no-click events");
    }
    return static_cast<double>(channels - 1) * variance / denom;
}

double mandel_q(const PhotonNumberDistribution &dist) {
    double mean = dist.factorial_moment(1);
    if (!(mean > 0.0)) {
        throw InvalidParameter("Mandel Q is undefined for the vacuum");
    }
    double second = dist.factorial_moment(2);
    return (second - mean * mean) / mean;
}

double min_symmetric_eigenvalue(const std::vector<double> &entries, std::size_t dimension) {
    if (dimension == 0 || entries.size() != dimension * dimension) {
        throw InvalidParameter("matrix entries do not match the dimension");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension));
    for (std::size_t a = 0; a < dimension; ++a) {
        for (std::size_t b = 0; b < dimension; ++b) {
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = entries[a * dimension + b];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolver did not converge");
    }
    return solver.eigenvalues().minCoeff();
}

MomentMatrix matrix_of_moments(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu) {
    require_uniform_args(channels, eta, nu);
    MomentMatrix out;
    out.dimension = channels / 2 + 1;
    std::vector<double> powers(2 * out.dimension - 1);
    for (std::size_t k = 0; k < powers.size(); ++k) {
        powers[k] = uniform_noclick_power(dist, channels, eta, nu, k);
    }
    out.entries = moment_matrix_entries(powers, out.dimension);
    out.min_eigenvalue = min_symmetric_eigenvalue(out.entries, out.dimension);
    return out;
}

AsymmetricConditions asymmetric_condition(const PhotonNumberDistribution &dist, std::size_t channels, double eta,
                                          double nu, std::size_t k) {
    require_uniform_args(channels, eta, nu);
    require_order(channels, k);
    const double one = uniform_absorption(channels, eta, 1);
    const double joint = uniform_absorption(channels, eta, k);
    const double scale = std::exp(-static_cast<double>(k) * nu);
    const double asym[] = {one, uniform_absorption(channels, eta, k - 1)};
    const double multi[] = {one, one, uniform_absorption(channels, eta, k - 2)};
    AsymmetricConditions out;
    out.asymmetric = scale * noise_free_condition(dist, asym, joint);
    out.multipartition = scale * noise_free_condition(dist, multi, joint);
    return out;
}

CriterionResult q_b_estimate(const ClickDataset &dataset, double threshold) {
    const std::size_t n = dataset.channels();
    if (n < 2) {
        throw InvalidParameter("equal-channel criteria need at least 2 channels");
    }
    PulseStatistics s = symmetric_statistics(dataset);
    auto fn = [n](const std::vector<double> &x) { return q_b_from(n, x[0], x[1]); };
    double value = fn(s.mean);
    return empirical_result("q_b", value, numeric_delta_error(s, fn), threshold);
}

CriterionResult matrix_of_moments_estimate(const ClickDataset &dataset, double threshold) {
    const std::size_t n = dataset.channels();
    if (n < 2) {
        throw InvalidParameter("equal-channel criteria need at least 2 channels");
    }
    PulseStatistics s = symmetric_statistics(dataset);
    const std::size_t dimension = n / 2 + 1;
    auto fn = [dimension](const std::vector<double> &x) {
        std::vector<double> powers(2 * dimension - 1);
        powers[0] = 1.0;
        for (std::size_t k = 1; k < powers.size(); ++k) {
            powers[k] = x[k - 1];
        }
        return min_symmetric_eigenvalue(moment_matrix_entries(powers, dimension), dimension);
    };
    double value = fn(s.mean);
    return empirical_result("matrix_of_moments", value, numeric_delta_error(s, fn), threshold);
}

CriterionResult asymmetric_estimate(const ClickDataset &dataset, std::size_t k, double threshold) {
    require_order(dataset.channels(), k);
    PulseStatistics s = symmetric_statistics(dataset);
    auto fn = [k](const std::vector<double> &x) { return x[k - 1] - x[0] * x[k - 2]; };
    return empirical_result("asymmetric " + std::to_string(k), fn(s.mean), numeric_delta_error(s, fn), threshold);
}

CriterionResult multipartition_estimate(const ClickDataset &dataset, std::size_t k, double threshold) {
    require_order(dataset.channels(), k);
    PulseStatistics s = symmetric_statistics(dataset);
    auto fn = [k](const std::vector<double> &x) {
        return x[k - 1] - x[0] * x[0] * x[k - 3];
    };
    return empirical_result("multipartition " + std::to_string(k), fn(s.mean), numeric_delta_error(s, fn),
                            threshold);
}

std::vector<double> bootstrap_partition(const ClickDataset &dataset, const Partition &partition,
                                        std::size_t resamples, std::uint64_t seed) {
    require_fits(partition.channels(), dataset);
    require_pulses(dataset);
    std::vector<ClickPattern> patterns;
    std::vector<std::uint64_t> cumulative;
    std::uint64_t running = 0;
    for (const auto &[pattern, count] : dataset.histogram()) {
        running += count;
        patterns.push_back(pattern);
        cumulative.push_back(running);
    }
    const std::uint64_t pulses = dataset.pulses();
    std::vector<double> values;
    values.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        PhiloxStream stream(seed, r, StreamDomain::bootstrap);
        std::vector<std::uint64_t> counts(patterns.size(), 0);
        for (std::uint64_t i = 0; i < pulses; ++i) {
            auto pick = static_cast<std::uint64_t>(stream.uniform() * static_cast<double>(pulses));
            pick = std::min(pick, pulses - 1);
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
            ++counts[static_cast<std::size_t>(it - cumulative.begin())];
        }
        ClickDataset::Histogram histogram;
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            if (counts[p] > 0) {
                histogram.emplace(patterns[p], counts[p]);
            }
        }
        ClickDataset resampled(dataset.channels(), pulses, std::move(histogram));
        values.push_back(partition_value(partition_statistics(resampled, partition).mean));
    }
    return values;
}

}  // namespace clickcert
