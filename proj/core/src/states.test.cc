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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "clickcert/errors.h"

namespace clickcert {
namespace {

double total(const PhotonNumberDistribution &d) {
    return std::accumulate(d.probs().begin(), d.probs().end(), 0.0);
}

void expect_normalized(const PhotonNumberDistribution &d) {
    EXPECT_LE(d.tail_bound(), kTruncationTail);
    EXPECT_LE(total(d), 1.0 + 1e-12) << d.label();
    EXPECT_GE(total(d), 1.0 - d.tail_bound() - 1e-12) << d.label();
    for (double p : d.probs()) {
        EXPECT_GE(p, 0.0);
    }
}

double direct_mean(const PhotonNumberDistribution &d) {
    double m = 0.0;
    for (std::size_t n = 0; n <= d.max_photons(); ++n) {
        m += static_cast<double>(n) * d.probability(n);
    }
    return m;
}

TEST(Coherent, Vacuum) {
    auto d = coherent(0.0);
    EXPECT_EQ(d.max_photons(), 0u);
    EXPECT_DOUBLE_EQ(d.probability(0), 1.0);
}

TEST(Coherent, UnitMean) {
    auto d = coherent(1.0);
    EXPECT_NEAR(d.probability(0), std::exp(-1.0), 1e-16);
    EXPECT_NEAR(d.probability(1), std::exp(-1.0), 1e-16);
}

TEST(Coherent, MatchesPoissonMassFunction) {
    auto d = coherent(2.5);
    expect_normalized(d);
    for (std::size_t n = 0; n <= d.max_photons(); ++n) {
        double ref = std::exp(-2.5 + n * std::log(2.5) - std::lgamma(n + 1.0));
        EXPECT_NEAR(d.probability(n), ref, 1e-15 + 1e-13 * ref) << n;
    }
    EXPECT_NEAR(d.probability(3), 0.21376301724973645, 1e-15);
}

TEST(Coherent, RejectsNegativeMean) { EXPECT_THROW(coherent(-0.1), InvalidParameter); }

TEST(Thermal, Vacuum) { EXPECT_DOUBLE_EQ(thermal(0.0).probability(0), 1.0); }

TEST(Thermal, UnitMeanIsGeometricHalf) {
    auto d = thermal(1.0);
    expect_normalized(d);
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_NEAR(d.probability(k), std::ldexp(1.0, -static_cast<int>(k + 1)), 1e-16);
    }
}

TEST(Thermal, Moments) {
    auto d = thermal(3.0);
    expect_normalized(d);
    EXPECT_NEAR(d.mean(), 3.0, 1e-12);
    EXPECT_NEAR(d.factorial_moment(2), 18.0, 1e-12);
    EXPECT_NEAR(direct_mean(d), 3.0, 1e-9);
}

TEST(Thermal, RejectsNegative) { EXPECT_THROW(thermal(-1.0), InvalidParameter); }

TEST(Fock, PointMass) {
    for (std::size_t n : {0u, 1u, 14u}) {
        auto d = fock(n);
        EXPECT_EQ(d.max_photons(), n);
        EXPECT_DOUBLE_EQ(d.probability(n), 1.0);
        EXPECT_DOUBLE_EQ(total(d), 1.0);
    }
    EXPECT_DOUBLE_EQ(fock(1).factorial_moment(2), 0.0);
    EXPECT_DOUBLE_EQ(fock(5).factorial_moment(2), 20.0);
}

// Brute force: weights n^j/(n+1)^(j+1) * (j+1)...(j+m) on photon number j+m, renormalized.
std::vector<double> added_reference(std::size_t m, double nbar, std::size_t terms) {
    std::vector<double> p(terms + m, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
        double w = std::pow(nbar, static_cast<double>(j)) / std::pow(nbar + 1.0, static_cast<double>(j + 1));
        for (std::size_t i = 1; i <= m; ++i) {
            w *= static_cast<double>(j + i);
        }
        p[j + m] = w;
        sum += w;
    }
    for (double &x : p) {
        x /= sum;
    }
    return p;
}

TEST(PhotonAdded, AddedToVacuumIsSinglePhoton) {
    auto d = photon_added_thermal(1, 0.0);
    EXPECT_DOUBLE_EQ(d.probability(1), 1.0);
    EXPECT_DOUBLE_EQ(d.probability(0), 0.0);
}

TEST(PhotonAdded, OneAddedUnitMean) {
    auto d = photon_added_thermal(1, 1.0);
    expect_normalized(d);
    EXPECT_DOUBLE_EQ(d.probability(0), 0.0);
    EXPECT_NEAR(d.probability(1), 0.25, 1e-15);
    EXPECT_NEAR(d.probability(2), 0.25, 1e-15);
    EXPECT_NEAR(d.probability(3), 3.0 / 16.0, 1e-15);
}

TEST(PhotonAdded, TwoAddedMatchesBruteForce) {
    auto d = photon_added_thermal(2, 0.5);
    expect_normalized(d);
    auto ref = added_reference(2, 0.5, 200);
    for (std::size_t n = 0; n < 60; ++n) {
        EXPECT_NEAR(d.probability(n), ref[n], 1e-12) << n;
    }
    EXPECT_NEAR(d.probability(2), 8.0 / 27.0, 1e-15);
    EXPECT_NEAR(d.probability(4), 16.0 / 81.0, 1e-15);
    EXPECT_NEAR(d.probability(5), 0.10973936899862825789, 1e-15);
}

TEST(PhotonAdded, NoMassBelowAdded) {
    for (std::size_t m = 1; m <= 5; ++m) {
        for (double nbar : {0.0, 0.3, 2.0, 7.5}) {
            auto d = photon_added_thermal(m, nbar);
            for (std::size_t k = 0; k < m; ++k) {
                EXPECT_EQ(d.probability(k), 0.0);
            }
            expect_normalized(d);
            // <n> = (m + 1) nbar + m
            EXPECT_NEAR(d.mean(), (m + 1) * nbar + m, 1e-12 * (1 + nbar * m));
            EXPECT_NEAR(direct_mean(d), d.mean(), 1e-9 * (1 + d.mean()));
        }
    }
}

TEST(PhotonAdded, RejectsZeroAdded) { EXPECT_THROW(photon_added_thermal(0, 1.0), InvalidParameter); }

TEST(EmitterCluster, DeterministicEmitters) {
    EXPECT_DOUBLE_EQ(emitter_cluster({1, 0.0, 1.0, 0.0}).probability(1), 1.0);
    EXPECT_DOUBLE_EQ(emitter_cluster({3, 0.0, 1.0, 0.0}).probability(3), 1.0);
}

TEST(EmitterCluster, BinomialConvolution) {
    auto d = emitter_cluster({2, 0.9, 0.1, 0.0});
    EXPECT_NEAR(d.probability(0), 0.81, 1e-15);
    EXPECT_NEAR(d.probability(1), 0.18, 1e-15);
    EXPECT_NEAR(d.probability(2), 0.01, 1e-15);
    auto e = emitter_cluster({2, 0.2, 0.5, 0.3});
    const double ref[] = {0.04, 0.2, 0.37, 0.3, 0.09};
    for (std::size_t n = 0; n < 5; ++n) {
        EXPECT_NEAR(e.probability(n), ref[n], 1e-15) << n;
    }
}

TEST(EmitterCluster, MeanIsAdditive) {
    for (std::size_t m : {1u, 4u, 14u, 100u}) {
        EmitterSpec s{m, 0.6, 0.3, 0.1};
        auto d = emitter_cluster(s);
        expect_normalized(d);
        EXPECT_NEAR(d.mean(), m * (0.3 + 2 * 0.1), 1e-12 * m);
        EXPECT_NEAR(direct_mean(d), d.mean(), 1e-11 * m);
    }
}

TEST(EmitterCluster, Validation) {
    EXPECT_THROW(emitter_cluster({0, 0.0, 1.0, 0.0}), InvalidParameter);
    EXPECT_THROW(emitter_cluster({2, 0.5, 0.6, 0.0}), InvalidParameter);
    EXPECT_THROW(emitter_cluster({2, -0.1, 1.1, 0.0}), InvalidParameter);
}

TEST(FactorialMoment, CoherentIsPowerOfMean) {
    auto d = coherent(1.7);
    EXPECT_NEAR(factorial_moment(d, 1), 1.7, 1e-14);
    EXPECT_NEAR(factorial_moment(d, 2), 1.7 * 1.7, 1e-14);
    EXPECT_NEAR(factorial_moment(d, 3), 1.7 * 1.7 * 1.7, 1e-13);
    EXPECT_THROW(factorial_moment(d, 0), InvalidParameter);
}

TEST(FactorialMoment, ClosedFormAgreesWithSeries) {
    std::vector<PhotonNumberDistribution> states{coherent(2.0), thermal(0.8), photon_added_thermal(2, 1.3),
                                                 emitter_cluster({6, 0.5, 0.4, 0.1})};
    for (const auto &d : states) {
        auto raw = PhotonNumberDistribution::from_probabilities(
            std::vector<double>(d.probs().begin(), d.probs().end()), d.tail_bound(), "raw");
        EXPECT_FALSE(raw.has_closed_form());
        // The discarded tail (mass below 1e-12) still carries up to n_max^k of weight per unit mass.
        const double n_max = static_cast<double>(d.probs().size());
        for (unsigned k = 1; k <= 3; ++k) {
            EXPECT_NEAR(raw.factorial_moment(k), d.factorial_moment(k),
                        1e-12 * std::pow(2.0 * n_max, k) * (1 + d.factorial_moment(k)) + 1e-13)
                << d.label() << " k=" << k;
        }
    }
}

TEST(GeneratingFunction, ClosedFormAgreesWithSeries) {
    std::vector<PhotonNumberDistribution> states{coherent(2.0), thermal(0.8), photon_added_thermal(1, 1.0),
                                                 emitter_cluster({14, 0.991, 0.009, 0.0}), fock(3)};
    for (const auto &d : states) {
        for (double lambda : {0.0, 1e-6, 0.0225, 0.3, 0.7, 1.0}) {
            double g = d.generating_function(lambda);
            double c = d.generating_complement(lambda);
            EXPECT_NEAR(g, d.series_generating_function(lambda), 1e-12) << d.label();
            EXPECT_NEAR(c, d.series_generating_complement(lambda), 1e-12) << d.label();
            EXPECT_NEAR(g + c, 1.0, 1e-15);
        }
    }
}

TEST(GeneratingFunction, ComplementKeepsRelativePrecision) {
    // 1 - (1 - 1e-10)^3 = 3e-10 - 3e-20 + ...
    EXPECT_NEAR(fock(3).generating_complement(1e-10), 3e-10 - 3e-20, 1e-25);
    // thermal: 1 - 1/(1 + n lambda) = n lambda / (1 + n lambda)
    EXPECT_NEAR(thermal(2.0).generating_complement(1e-12), 2e-12 / (1 + 2e-12), 1e-27);
}

TEST(Mixture, WeightsProbabilities) {
    std::vector<std::pair<double, PhotonNumberDistribution>> parts{{0.25, fock(1)}, {0.75, thermal(1.0)}};
    auto d = mixture(parts);
    EXPECT_NEAR(d.probability(1), 0.25 + 0.75 * 0.25, 1e-15);
    EXPECT_NEAR(d.generating_function(0.5), 0.25 * 0.5 + 0.75 / 1.5, 1e-15);
    expect_normalized(d);
    std::vector<std::pair<double, PhotonNumberDistribution>> bad{{0.5, fock(1)}, {0.6, fock(2)}};
    EXPECT_THROW(mixture(bad), InvalidParameter);
}

TEST(FromProbabilities, Validates) {
    EXPECT_NO_THROW(PhotonNumberDistribution::from_probabilities({0.5, 0.5}, 0.0, "ok"));
    EXPECT_THROW(PhotonNumberDistribution::from_probabilities({0.5, 0.4}, 0.0, "short"), InvalidParameter);
    EXPECT_THROW(PhotonNumberDistribution::from_probabilities({1.5, -0.5}, 0.0, "neg"), InvalidParameter);
    EXPECT_THROW(PhotonNumberDistribution::from_probabilities({}, 0.0, "empty"), InvalidParameter);
}

TEST(Truncation, CeilingIsEnforced) {
    EXPECT_THROW(coherent(5000.0), InvalidParameter);
    EXPECT_THROW(thermal(1000.0), InvalidParameter);
    EXPECT_NO_THROW(thermal(20.0));
}

}  // namespace
}  // namespace clickcert
