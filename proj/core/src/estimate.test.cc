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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "clickcert/errors.h"

namespace clickcert {
namespace {

ClickDataset simulate(const PhotonNumberDistribution &state, const SplittingConfig &s, const DetectorModel &d,
                      std::uint64_t pulses, std::uint64_t seed) {
    return sample_dataset(SimulationPlan{state, s, d, pulses, seed, 65536, 0}, 2);
}

const SplittingConfig kSym4 = SplittingConfig::symmetric(4);
const DetectorModel kIdeal4 = DetectorModel::uniform(4, 1.0);
const SplittingConfig kSkew4 = SplittingConfig::make({0.35, 0.25, 0.22, 0.18});
const DetectorModel kReal4 = DetectorModel::linear({0.8, 0.6, 0.7, 0.5}, {0.01, 0.0, 0.02, 0.005});

TEST(BlockMoment, Examples) {
    MomentEstimate all = block_moment(ClickDataset(4, 10, {{0, 10}}), ChannelSet{0, 1, 2, 3});
    EXPECT_EQ(all.value, 1.0);
    EXPECT_EQ(all.std_error, 0.0);
    ClickDataset d(4, 4, {{0b0000, 3}, {0b0010, 1}});  // "0100": channel 2 clicked once
    MomentEstimate two = block_moment(d, ChannelSet{1});
    EXPECT_DOUBLE_EQ(two.value, 0.75);
    EXPECT_DOUBLE_EQ(two.std_error, std::sqrt(0.75 * 0.25 / 4));
    EXPECT_EQ(block_moment(d, ChannelSet{0, 2}).value, 1.0);
    EXPECT_EQ(two.pulses, 4u);
}

TEST(BlockMoment, Errors) {
    ClickDataset d(4, 4, {{0, 4}});
    EXPECT_THROW(block_moment(d, ChannelSet{}), InvalidParameter);
    EXPECT_THROW(block_moment(d, ChannelSet{4}), InvalidParameter);
    EXPECT_THROW(block_moment(ClickDataset::empty(4), ChannelSet{0}), InvalidParameter);
}

TEST(BlockMoment, StandardErrorBound) {
    ClickDataset d = simulate(thermal(0.7), kSkew4, kReal4, 10'000, 3);
    for (std::uint64_t mask = 1; mask < 16; ++mask) {
        MomentEstimate m = block_moment(d, ChannelSet(mask));
        EXPECT_GE(m.value, 0.0);
        EXPECT_LE(m.value, 1.0);
        EXPECT_LE(m.std_error, 0.5 / std::sqrt(10'000.0) + 1e-15);
    }
}

TEST(CriterionResult, SignificanceAndVerdict) {
    EXPECT_EQ(empirical_result("a", 0.2, 0.01).significance, 0.0);
    EXPECT_EQ(empirical_result("a", 0.0, 0.01).significance, 0.0);
    CriterionResult r = empirical_result("a", -0.05, 0.01);
    EXPECT_DOUBLE_EQ(r.significance, 5.0);
    EXPECT_EQ(r.verdict, Verdict::nonclassical);
    EXPECT_EQ(empirical_result("a", -0.05, 0.01, 6.0).verdict, Verdict::inconclusive);
    EXPECT_EQ(empirical_result("a", -0.03, 0.01).verdict, Verdict::nonclassical);
    EXPECT_EQ(empirical_result("a", -0.05, 0.0).verdict, Verdict::inconclusive);
    EXPECT_TRUE(std::isinf(analytic_result("b", -0.1).significance));
    EXPECT_EQ(analytic_result("b", -1e-13).verdict, Verdict::inconclusive);
    EXPECT_EQ(to_string(Verdict::nonclassical), "nonclassical");
}

TEST(PartitionEstimate, SingleBlockIsZero) {
    ClickDataset d = simulate(fock(1), kSym4, kIdeal4, 1000, 1);
    CriterionResult r = partition_estimate(d, parse_partition("1,2,3,4"));
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.std_error, 0.0);
}

TEST(PartitionEstimate, SinglePhotonFullPartition) {
    ClickDataset d = simulate(fock(1), kSym4, kIdeal4, 1'000'000, 2);
    CriterionResult r = partition_estimate(d, full_partition(4));
    EXPECT_GT(r.std_error, 0.0);
    EXPECT_LE(std::abs(r.value + 0.31640625), 4 * r.std_error);
    EXPECT_EQ(r.verdict, Verdict::nonclassical);
    EXPECT_EQ(r.label, "1|2|3|4");
}

TEST(PartitionEstimate, CoherentLightIsConsistentWithZero) {
    ClickDataset d = simulate(coherent(1.0), kSkew4, kReal4, 1'000'000, 3);
    for (const Partition &p : enumerate_partitions(4, 2)) {
        CriterionResult r = partition_estimate(d, p);
        EXPECT_LE(std::abs(r.value), 4 * r.std_error) << format_partition(p);
    }
}

TEST(PartitionEstimate, EmptyDatasetIsAnError) {
    EXPECT_THROW(partition_estimate(ClickDataset::empty(4), full_partition(4)), InvalidParameter);
    EXPECT_THROW(partition_estimate(ClickDataset(2, 1, {{0, 1}}), full_partition(3)), InvalidParameter);
}

TEST(CovarianceEstimate, Examples) {
    ClickDataset coh = simulate(coherent(0.8), kSym4, kIdeal4, 500'000, 4);
    EXPECT_LT(covariance_estimate(coh, 0, 1).significance, 4.0);
    ClickDataset single(4, 1, {{0, 1}});
    CriterionResult r = covariance_estimate(single, 0, 2);
    EXPECT_EQ(r.std_error, 0.0);
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_EQ(r.label, "pair 1 3");
    EXPECT_THROW(covariance_estimate(single, 1, 1), InvalidParameter);
}

TEST(CovarianceEstimate, FourteenEmitterCluster) {
    // model value (1 - eta/2)^14 - (1 - eta/4)^28 at eta = 0.009
    const double model = -6.68411424545347e-5;
    auto state = emitter_cluster({14, 0.991, 0.009, 0.0});
    EXPECT_NEAR(covariance_condition(state, kSym4, kIdeal4, 0, 2), model, 1e-15);
    ClickDataset d = simulate(state, kSym4, kIdeal4, 10'000'000, 5);
    CriterionResult r = covariance_estimate(d, 0, 2);
    EXPECT_LT(r.value, 0.0);
    EXPECT_GT(r.significance, 0.0);
    EXPECT_LE(std::abs(r.value - model), 4 * r.std_error);
}

TEST(QPB, AnalyticExamples) {
    EXPECT_NEAR(q_pb(coherent(1.5), kSkew4, kReal4), 0.0, 1e-14);
    EXPECT_LT(q_pb(fock(1), kSym4, kIdeal4), 0.0);
    EXPECT_GT(q_pb(thermal(1.0), kSkew4, kReal4), 0.0);
    EXPECT_THROW(q_pb(fock(1), SplittingConfig::symmetric(1), DetectorModel::uniform(1, 1.0)), InvalidParameter);
    EXPECT_THROW(q_pb(fock(0), kSym4, kIdeal4), InvalidParameter);
}

TEST(QPB, EqualsQBUnderEqualSplitting) {
    std::vector<PhotonNumberDistribution> states{fock(1), thermal(0.5), photon_added_thermal(2, 0.4), coherent(0.9),
                                                 emitter_cluster({14, 0.991, 0.009, 0.0})};
    for (const auto &s : states) {
        for (std::size_t n : {2u, 4u, 7u}) {
            for (double eta : {0.3, 1.0}) {
                for (double nu : {0.0, 0.05}) {
                    double pb = q_pb(s, SplittingConfig::symmetric(n), DetectorModel::uniform(n, eta, nu));
                    double b = q_b(s, n, eta, nu);
                    EXPECT_NEAR(pb, b, 1e-12 * std::max(1.0, std::abs(b))) << s.label() << " N=" << n;
                }
            }
        }
    }
}

TEST(QPB, DatasetEstimateMatchesOracle) {
    auto state = photon_added_thermal(1, 1.0);
    ClickDataset d = simulate(state, kSkew4, kReal4, 1'000'000, 6);
    CriterionResult r = q_pb(d);
    EXPECT_GT(r.std_error, 0.0);
    EXPECT_LE(std::abs(r.value - q_pb(state, kSkew4, kReal4)), 4 * r.std_error);
    EXPECT_EQ(r.label, "q_pb");
}

TEST(MandelQ, Examples) {
    EXPECT_NEAR(mandel_q(coherent(2.3)), 0.0, 1e-12);
    for (std::size_t n : {1u, 2u, 14u}) {
        EXPECT_NEAR(mandel_q(fock(n)), -1.0, 1e-12);
    }
    for (double nbar : {0.1, 1.0, 4.0}) {
        EXPECT_NEAR(mandel_q(thermal(nbar)), nbar, 1e-12);
    }
    EXPECT_THROW(mandel_q(fock(0)), InvalidParameter);
}

TEST(QB, ThermalExample) {
    // m = 1/(1 + nbar/2) = 0.8, <:m^2:> = 1/(1 + nbar) = 2/3
    EXPECT_NEAR(q_b(thermal(0.5), 2, 1.0, 0.0), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(q_b(thermal(0.5), 4, 1.0, 0.0), 0.3, 1e-14);
    EXPECT_THROW(q_b(thermal(0.5), 1, 1.0, 0.0), InvalidParameter);
}

TEST(QB, ConvergesToMandelQ) {
    const auto state = thermal(0.5);
    const double q = mandel_q(state);
    double first = std::abs(q_b(state, 2, 1.0, 0.0) - q);
    double previous = first;
    double last = first;
    for (std::size_t n = 4; n <= 1024; n += 2) {
        last = std::abs(q_b(state, n, 1.0, 0.0) - q);
        EXPECT_LT(last, previous) << n;
        previous = last;
    }
    EXPECT_LT(last, first / 50.0);
}

TEST(MatrixOfMoments, CoherentIsPositiveSemidefinite) {
    for (std::size_t n : {2u, 4u, 6u}) {
        MomentMatrix m = matrix_of_moments(coherent(1.3), n, 0.8, 0.01);
        EXPECT_EQ(m.dimension, n / 2 + 1);
        EXPECT_GE(m.min_eigenvalue, -1e-12);
    }
    EXPECT_THROW(matrix_of_moments(coherent(1.0), 1, 1.0, 0.0), InvalidParameter);
}

TEST(MatrixOfMoments, MinorIsNoclickVariance) {
    std::vector<PhotonNumberDistribution> states{fock(1), thermal(0.8), photon_added_thermal(1, 0.3)};
    for (const auto &s : states) {
        for (std::size_t n : {4u, 6u}) {
            MomentMatrix m = matrix_of_moments(s, n, 0.9, 0.02);
            for (std::size_t l = 1; l <= n / 2; ++l) {
                double det = m.at(0, 0) * m.at(l, l) - m.at(0, l) * m.at(l, 0);
                std::vector<std::vector<std::size_t>> blocks(2);
                for (std::size_t k = 0; k < l; ++k) {
                    blocks[0].push_back(k);
                    blocks[1].push_back(l + k);
                }
                double var = partition_condition(s, SplittingConfig::symmetric(n), DetectorModel::uniform(n, 0.9, 0.02),
                                                 canonical_partition(blocks));
                EXPECT_NEAR(det, var, 1e-12) << s.label() << " l=" << l;
            }
        }
    }
}

TEST(MatrixOfMoments, SinglePhotonHasNegativeMinor) {
    MomentMatrix m = matrix_of_moments(fock(1), 4, 1.0, 0.0);
    EXPECT_LT(m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0), 0.0);
    EXPECT_LT(m.min_eigenvalue, 0.0);
}

TEST(AsymmetricCondition, Examples) {
    for (std::size_t k = 3; k <= 5; ++k) {
        AsymmetricConditions c = asymmetric_condition(coherent(2.0), 5, 0.7, 0.01, k);
        EXPECT_NEAR(c.asymmetric, 0.0, 1e-14);
        EXPECT_NEAR(c.multipartition, 0.0, 1e-14);
        AsymmetricConditions t = asymmetric_condition(thermal(1.2), 5, 0.7, 0.01, k);
        EXPECT_GE(t.asymmetric, 0.0);
        EXPECT_GE(t.multipartition, 0.0);
    }
    AsymmetricConditions f = asymmetric_condition(fock(1), 4, 1.0, 0.0, 3);
    EXPECT_NEAR(f.asymmetric, partition_condition(fock(1), kSym4, kIdeal4, parse_partition("1|2,3")), 1e-12);
    EXPECT_NEAR(f.multipartition, partition_condition(fock(1), kSym4, kIdeal4, parse_partition("1|2|3")), 1e-12);
    EXPECT_THROW(asymmetric_condition(fock(1), 4, 1.0, 0.0, 2), InvalidParameter);
    EXPECT_THROW(asymmetric_condition(fock(1), 4, 1.0, 0.0, 5), InvalidParameter);
}

TEST(SymmetrizedEstimates, MatchOracle) {
    auto state = photon_added_thermal(1, 0.6);
    const double eta = 0.7, nu = 0.01;
    ClickDataset d = simulate(state, kSym4, DetectorModel::uniform(4, eta, nu), 1'000'000, 8);
    CriterionResult qb = q_b_estimate(d);
    EXPECT_LE(std::abs(qb.value - q_b(state, 4, eta, nu)), 4 * qb.std_error);
    CriterionResult mm = matrix_of_moments_estimate(d);
    EXPECT_LE(std::abs(mm.value - matrix_of_moments(state, 4, eta, nu).min_eigenvalue), 4 * mm.std_error);
    for (std::size_t k = 3; k <= 4; ++k) {
        AsymmetricConditions exact = asymmetric_condition(state, 4, eta, nu, k);
        CriterionResult a = asymmetric_estimate(d, k);
        CriterionResult m = multipartition_estimate(d, k);
        EXPECT_LE(std::abs(a.value - exact.asymmetric), 4 * a.std_error) << k;
        EXPECT_LE(std::abs(m.value - exact.multipartition), 4 * m.std_error) << k;
        EXPECT_GT(a.std_error, 0.0);
    }
    EXPECT_THROW(asymmetric_estimate(d, 5), InvalidParameter);
}

TEST(Properties, EstimatorConsistencyAcrossSeeds) {
    struct Case {
        PhotonNumberDistribution state;
        Partition partition;
    };
    std::vector<Case> cases{{thermal(1.0), full_partition(4)},
                            {fock(1), parse_partition("1,3|2")},
                            {photon_added_thermal(1, 1.0), parse_partition("1|2,3,4")}};
    for (const Case &c : cases) {
        const double exact = partition_condition(c.state, kSkew4, kReal4, c.partition);
        int inside = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            CriterionResult r = partition_estimate(simulate(c.state, kSkew4, kReal4, 100'000, 1000 + seed), c.partition);
            inside += std::abs(r.value - exact) <= 4 * r.std_error;
        }
        EXPECT_GE(inside, 99) << c.state.label();
    }
}

TEST(Properties, DeltaMethodAgreesWithBootstrap) {
    for (const auto &state : {thermal(1.0), photon_added_thermal(1, 1.0)}) {
        ClickDataset d = simulate(state, kSkew4, kReal4, 100'000, 21);
        Partition p = full_partition(4);
        CriterionResult r = partition_estimate(d, p);
        std::vector<double> values = bootstrap_partition(d, p, 200, 99);
        double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        double sd = std::sqrt(ss / (values.size() - 1));
        EXPECT_NEAR(r.std_error / sd, 1.0, 0.2) << state.label();
    }
}

TEST(Bootstrap, IsReproducible) {
    ClickDataset d = simulate(thermal(1.0), kSym4, kIdeal4, 2000, 1);
    EXPECT_EQ(bootstrap_partition(d, full_partition(4), 5, 3), bootstrap_partition(d, full_partition(4), 5, 3));
    EXPECT_NE(bootstrap_partition(d, full_partition(4), 5, 3), bootstrap_partition(d, full_partition(4), 5, 4));
}

}  // namespace
}  // namespace clickcert
