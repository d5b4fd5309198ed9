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

#include "clickcert/states.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "clickcert/errors.h"

namespace clickcert {

namespace {

using Family = detail::ClosedFormTerm::Family;

std::string describe(const char *name, double value) {
    std::ostringstream out;
    out << name << '(' << value << ')';
    return out.str();
}

void require_finite_nonnegative(double value, const char *what) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidParameter(std::string(what) + " must be finite and non-negative");
    }
}

/// Keeps the smallest prefix whose discarded suffix (plus `beyond`) is below the policy tail.
std::pair<std::vector<double>, double> truncate_terms(std::vector<double> terms, double beyond) {
    std::vector<double> suffix(terms.size() + 1, 0.0);
    for (std::size_t n = terms.size(); n-- > 0;) {
        suffix[n] = suffix[n + 1] + terms[n];
    }
    for (std::size_t keep = 1; keep <= terms.size(); ++keep) {
        double tail = suffix[keep] + beyond;
        if (tail < kTruncationTail) {
            if (keep - 1 > kMaxPhotonNumber) {
                break;
            }
            terms.resize(keep);
            return {std::move(terms), tail};
        }
    }
    throw InvalidParameter("distribution needs more than " + std::to_string(kMaxPhotonNumber) +
                           " photon numbers to reach tail mass 1e-12");
}

/// Generates p_n from a log-pmf until the geometric tail bound is negligible. `ratio(n)` is
/// p_{n+1}/p_n and must be non-increasing beyond `mode`.
template <typename LogPmf, typename Ratio>
std::pair<std::vector<double>, double> truncate_series(LogPmf log_pmf, Ratio ratio, double mode) {
    constexpr double kNegligible = 1e-30;
    const std::size_t limit = kMaxPhotonNumber + 64;
    std::vector<double> terms;
    double beyond = 1.0;
    for (std::size_t n = 0; n <= limit; ++n) {
        terms.push_back(std::exp(log_pmf(n)));
        double r = ratio(n);
        if (static_cast<double>(n) > mode && r < 1.0) {
            beyond = terms.back() * r / (1.0 - r);
            if (beyond < kNegligible) {
                break;
            }
        }
    }
    return truncate_terms(std::move(terms), beyond);
}

double log1m(double absorbed) { return std::log1p(-absorbed); }

double term_generating(const detail::ClosedFormTerm &t, double absorbed) {
    switch (t.family) {
        case Family::poisson:
            return std::exp(-t.scale * absorbed);
        case Family::geometric:
            return 1.0 / (1.0 + t.scale * absorbed);
        case Family::fock:
            if (t.count == 0) {
                return 1.0;
            }
            return std::exp(static_cast<double>(t.count) * log1m(absorbed));
        case Family::photon_added:
            return std::exp(static_cast<double>(t.count) * log1m(absorbed) -
                            static_cast<double>(t.count + 1) * std::log1p(t.scale * absorbed));
        case Family::cluster: {
            double s = t.p1 * absorbed + t.p2 * absorbed * (2.0 - absorbed);
            return std::exp(static_cast<double>(t.count) * std::log1p(-s));
        }
    }
    return 0.0;
}

double term_complement(const detail::ClosedFormTerm &t, double absorbed) {
    switch (t.family) {
        case Family::poisson:
            return -std::expm1(-t.scale * absorbed);
        case Family::geometric:
            return t.scale * absorbed / (1.0 + t.scale * absorbed);
        case Family::fock:
            if (t.count == 0) {
                return 0.0;
            }
            return -std::expm1(static_cast<double>(t.count) * log1m(absorbed));
        case Family::photon_added:
            return -std::expm1(static_cast<double>(t.count) * log1m(absorbed) -
                               static_cast<double>(t.count + 1) * std::log1p(t.scale * absorbed));
        case Family::cluster: {
            double s = t.p1 * absorbed + t.p2 * absorbed * (2.0 - absorbed);
            return -std::expm1(static_cast<double>(t.count) * std::log1p(-s));
        }
    }
    return 0.0;
}

double falling(double n, unsigned k) {
    double out = 1.0;
    for (unsigned i = 0; i < k; ++i) {
        out *= n - i;
    }
    return out;
}

double binomial(unsigned n, unsigned k) {
    double out = 1.0;
    for (unsigned i = 1; i <= k; ++i) {
        out = out * (n - k + i) / i;
    }
    return out;
}

double term_factorial_moment(const detail::ClosedFormTerm &t, unsigned k) {
    switch (t.family) {
        case Family::poisson:
            return std::pow(t.scale, k);
        case Family::geometric:
            return std::tgamma(k + 1.0) * std::pow(t.scale, k);
        case Family::fock:
            return k > t.count ? 0.0 : falling(static_cast<double>(t.count), k);
        case Family::photon_added: {
            // k-th derivative at x = 1 of x^m (1 + nbar (1 - x))^-(m+1), via Leibniz.
            double m = static_cast<double>(t.count);
            double total = 0.0;
            for (unsigned i = 0; i <= k && i <= t.count; ++i) {
                double rising = 1.0;
                for (unsigned j = 0; j < k - i; ++j) {
                    rising *= m + 1.0 + j;
                }
                total += binomial(k, i) * falling(m, i) * rising * std::pow(t.scale, k - i);
            }
            return total;
        }
        case Family::cluster: {
            // k! [t^k] (1 + (p1 + 2 p2) t + p2 t^2)^M.
            std::vector<double> base = {1.0, t.p1 + 2.0 * t.p2, t.p2};
            std::vector<double> power(k + 1, 0.0);
            power[0] = 1.0;
            for (std::size_t e = 0; e < t.count; ++e) {
                std::vector<double> next(k + 1, 0.0);
                for (unsigned i = 0; i <= k; ++i) {
                    for (unsigned j = 0; j < base.size() && i + j <= k; ++j) {
                        next[i + j] += power[i] * base[j];
                    }
                }
                power = std::move(next);
            }
            return std::tgamma(k + 1.0) * power[k];
        }
    }
    return 0.0;
}

}  // namespace

struct DistributionBuilder {
    static PhotonNumberDistribution make(std::vector<double> probs, double tail, std::string label,
                                         std::vector<detail::ClosedFormTerm> terms) {
        PhotonNumberDistribution d;
        d.probs_ = std::move(probs);
        d.tail_bound_ = tail;
        d.label_ = std::move(label);
        d.terms_ = std::move(terms);
        return d;
    }
};

void EmitterSpec::validate() const {
    if (emitters < 1) {
        throw InvalidParameter("emitter cluster needs at least one emitter");
    }
    for (double p : {p0, p1, p2}) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw InvalidParameter("emitter probabilities must lie in [0, 1]");
        }
    }
    if (std::abs(p0 + p1 + p2 - 1.0) > 1e-12) {
        throw InvalidParameter("emitter probabilities must sum to 1");
    }
}

PhotonNumberDistribution PhotonNumberDistribution::from_probabilities(std::vector<double> probs,
                                                                      double tail_bound,
                                                                      std::string label) {
    if (probs.empty()) {
        throw InvalidParameter("photon-number distribution needs at least one probability");
    }
    if (probs.size() - 1 > kMaxPhotonNumber) {
        throw InvalidParameter("photon-number distribution exceeds the photon-number ceiling");
    }
    if (!std::isfinite(tail_bound) || tail_bound < 0.0 || tail_bound > 1.0) {
        throw InvalidParameter("tail bound must lie in [0, 1]");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) {
            throw InvalidParameter("probabilities must be finite and non-negative");
        }
        sum += p;
    }
    constexpr double kRounding = 1e-12;
    if (sum > 1.0 + kRounding || sum < 1.0 - tail_bound - kRounding) {
        throw InvalidParameter("probabilities sum outside [1 - tail_bound, 1]");
    }
    return DistributionBuilder::make(std::move(probs), tail_bound, std::move(label), {});
}

double PhotonNumberDistribution::generating_function(double absorbed) const {
    if (terms_.empty()) {
        return series_generating_function(absorbed);
    }
    double total = 0.0;
    for (const auto &t : terms_) {
        total += t.weight * term_generating(t, absorbed);
    }
    return total;
}

double PhotonNumberDistribution::generating_complement(double absorbed) const {
    if (terms_.empty()) {
        return series_generating_complement(absorbed);
    }
    double total = 0.0;
    for (const auto &t : terms_) {
        total += t.weight * term_complement(t, absorbed);
    }
    return total;
}

double PhotonNumberDistribution::series_generating_function(double absorbed) const {
    // p_0 is kept apart so absorbed == 1 never meets 0 * -inf.
    double log_x = log1m(absorbed);
    double total = probs_[0];
    for (std::size_t n = 1; n < probs_.size(); ++n) {
        total += probs_[n] * std::exp(static_cast<double>(n) * log_x);
    }
    return total;
}

double PhotonNumberDistribution::series_generating_complement(double absorbed) const {
    double log_x = log1m(absorbed);
    double total = 0.0;
    for (std::size_t n = 1; n < probs_.size(); ++n) {
        total += probs_[n] * -std::expm1(static_cast<double>(n) * log_x);
    }
    return total;
}

double PhotonNumberDistribution::factorial_moment(unsigned k) const {
    if (k == 0) {
        throw InvalidParameter("factorial moment order must be at least 1");
    }
    if (!terms_.empty()) {
        double total = 0.0;
        for (const auto &t : terms_) {
            total += t.weight * term_factorial_moment(t, k);
        }
        return total;
    }
    double total = 0.0;
    for (std::size_t n = k; n < probs_.size(); ++n) {
        total += probs_[n] * falling(static_cast<double>(n), k);
    }
    return total;
}

double factorial_moment(const PhotonNumberDistribution &dist, unsigned k) { return dist.factorial_moment(k); }

PhotonNumberDistribution coherent(double mean_photons) {
    require_finite_nonnegative(mean_photons, "mean photon number");
    detail::ClosedFormTerm term{Family::poisson, 1.0, mean_photons, 0, 0.0, 0.0};
    if (mean_photons == 0.0) {
        return DistributionBuilder::make({1.0}, 0.0, describe("coherent", 0.0), {term});
    }
    double log_mu = std::log(mean_photons);
    auto [probs, tail] = truncate_series(
        [&](std::size_t n) {
            double k = static_cast<double>(n);
            return -mean_photons + k * log_mu - std::lgamma(k + 1.0);
        },
        [&](std::size_t n) { return mean_photons / (static_cast<double>(n) + 1.0); }, mean_photons);
    return DistributionBuilder::make(std::move(probs), tail, describe("coherent", mean_photons), {term});
}

PhotonNumberDistribution thermal(double nbar) {
    require_finite_nonnegative(nbar, "thermal mean photon number");
    detail::ClosedFormTerm term{Family::geometric, 1.0, nbar, 0, 0.0, 0.0};
    if (nbar == 0.0) {
        return DistributionBuilder::make({1.0}, 0.0, describe("thermal", 0.0), {term});
    }
    double log_ratio = std::log(nbar) - std::log1p(nbar);
    double log_norm = -std::log1p(nbar);
    double ratio = nbar / (nbar + 1.0);
    auto [probs, tail] = truncate_series(
        [&](std::size_t n) { return log_norm + static_cast<double>(n) * log_ratio; },
        [&](std::size_t) { return ratio; }, 0.0);
    return DistributionBuilder::make(std::move(probs), tail, describe("thermal", nbar), {term});
}

PhotonNumberDistribution fock(std::size_t n) {
    if (n > kMaxPhotonNumber) {
        throw InvalidParameter("Fock number exceeds the photon-number ceiling");
    }
    std::vector<double> probs(n + 1, 0.0);
    probs[n] = 1.0;
    detail::ClosedFormTerm term{Family::fock, 1.0, 0.0, n, 0.0, 0.0};
    return DistributionBuilder::make(std::move(probs), 0.0, "fock(" + std::to_string(n) + ")", {term});
}

PhotonNumberDistribution photon_added_thermal(std::size_t added, double nbar) {
    if (added < 1) {
        throw InvalidParameter("photon-added thermal state needs at least one added photon");
    }
    require_finite_nonnegative(nbar, "thermal mean photon number");
    std::ostringstream label;
    label << "photon_added_thermal(" << added << ',' << nbar << ')';
    detail::ClosedFormTerm term{Family::photon_added, 1.0, nbar, added, 0.0, 0.0};
    if (nbar == 0.0) {
        if (added > kMaxPhotonNumber) {
            throw InvalidParameter("added photons exceed the photon-number ceiling");
        }
        std::vector<double> probs(added + 1, 0.0);
        probs[added] = 1.0;
        return DistributionBuilder::make(std::move(probs), 0.0, label.str(), {term});
    }
    // p_{j+m} = C(j+m, m) r^j / (nbar + 1)^(m+1) with r = nbar / (nbar + 1).
    double m = static_cast<double>(added);
    double log_r = std::log(nbar) - std::log1p(nbar);
    double log_norm = -(m + 1.0) * std::log1p(nbar);
    double r = nbar / (nbar + 1.0);
    auto [probs, tail] = truncate_series(
        [&](std::size_t n) {
            if (n < added) {
                return -std::numeric_limits<double>::infinity();
            }
            double j = static_cast<double>(n - added);
            return std::lgamma(j + m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m + 1.0) + j * log_r +
                   log_norm;
        },
        [&](std::size_t n) {
            if (n < added) {
                return std::numeric_limits<double>::infinity();
            }
            double j = static_cast<double>(n - added);
            return r * (j + m + 1.0) / (j + 1.0);
        },
        m + (m + 1.0) * nbar);
    return DistributionBuilder::make(std::move(probs), tail, label.str(), {term});
}

PhotonNumberDistribution emitter_cluster(const EmitterSpec &spec) {
    spec.validate();
    std::vector<double> single = {spec.p0, spec.p1, spec.p2};
    std::vector<double> probs = {1.0};
    for (std::size_t e = 0; e < spec.emitters; ++e) {
        std::vector<double> next(probs.size() + 2, 0.0);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                next[i + j] += probs[i] * single[j];
            }
        }
        probs = std::move(next);
    }
    while (probs.size() > 1 && probs.back() == 0.0) {
        probs.pop_back();
    }
    double tail = 0.0;
    if (probs.size() - 1 > kMaxPhotonNumber) {
        std::tie(probs, tail) = truncate_terms(std::move(probs), 0.0);
    }
    std::ostringstream label;
    label << "emitter_cluster(" << spec.emitters << ',' << spec.p0 << ',' << spec.p1 << ',' << spec.p2 << ')';
    detail::ClosedFormTerm term{Family::cluster, 1.0, 0.0, spec.emitters, spec.p1, spec.p2};
    return DistributionBuilder::make(std::move(probs), tail, label.str(), {term});
}

PhotonNumberDistribution mixture(std::span<const std::pair<double, PhotonNumberDistribution>> components) {
    if (components.empty()) {
        throw InvalidParameter("mixture needs at least one component");
    }
    double weight_sum = 0.0;
    std::size_t size = 0;
    bool closed = true;
    for (const auto &[w, d] : components) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InvalidParameter("mixture weights must be finite and non-negative");
        }
        weight_sum += w;
        size = std::max(size, d.probs_.size());
        closed = closed && d.has_closed_form();
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        throw InvalidParameter("mixture weights must sum to 1");
    }
    std::vector<double> probs(size, 0.0);
    double tail = 0.0;
    std::vector<detail::ClosedFormTerm> terms;
    std::string label = "mixture(";
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto &[w, d] = components[c];
        for (std::size_t n = 0; n < d.probs_.size(); ++n) {
            probs[n] += w * d.probs_[n];
        }
        tail += w * d.tail_bound_;
        if (closed) {
            for (auto t : d.terms_) {
                t.weight *= w;
                terms.push_back(t);
            }
        }
        std::ostringstream part;
        part << (c == 0 ? "" : ",") << w << '*' << d.label_;
        label += part.str();
    }
    label += ')';
    return DistributionBuilder::make(std::move(probs), tail, std::move(label), std::move(terms));
}

}  // namespace clickcert
