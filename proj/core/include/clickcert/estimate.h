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

#ifndef CLICKCERT_ESTIMATE_H
#define CLICKCERT_ESTIMATE_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clickcert/channels.h"
#include "clickcert/network.h"
#include "clickcert/oracle.h"
#include "clickcert/simulate.h"
#include "clickcert/states.h"

namespace clickcert {

/// Verdicts need a violation of at least this many standard errors by default.
inline constexpr double kDefaultThreshold = 3.0;

/// Sample frequency of a no-click event with its binomial standard error.
struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t pulses = 0;
};

enum class Verdict { nonclassical, inconclusive };
std::string_view to_string(Verdict verdict);

struct CriterionResult {
    std::string label;
    double value = 0.0;
    double std_error = 0.0;
    /// -value / std_error for negative values, else 0. Infinite for analytic violations.
    double significance = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

/// Result for a sampled value. A zero standard error (degenerate sample) is never
/// significant.
CriterionResult empirical_result(std::string label, double value, double std_error,
                                 double threshold = kDefaultThreshold);
/// Result for an exact value: std_error = 0 and any value below -kClassicalSlack is an
/// infinitely significant violation.
CriterionResult analytic_result(std::string label, double value, double threshold = kDefaultThreshold);

/// Fraction of pulses with no click on any channel in `block`.
MomentEstimate block_moment(const ClickDataset &dataset, ChannelSet block);

/// Sampled partition condition.
///
/// The value is the joint no-click frequency minus the product of the block frequencies.
/// Its error propagates the per-pulse covariance of the block indicators through the
/// condition: the first-order (gradient) term plus the second-order term
/// tr((H Sigma)^2) / (2 P^2), which only matters where the first-order term vanishes.
CriterionResult partition_estimate(const ClickDataset &dataset, const Partition &partition,
                                   double threshold = kDefaultThreshold);
/// Two-channel case; i != j, 0-based.
CriterionResult covariance_estimate(const ClickDataset &dataset, std::size_t i, std::size_t j,
                                    double threshold = kDefaultThreshold);

/// Sub-Poisson-binomial parameter sum_{i!=j} Cov_ij / sum_i m_i (1 - m_i). Needs N >= 2.
double q_pb(const PhotonNumberDistribution &dist, const SplittingConfig &splitting, const DetectorModel &detectors);
CriterionResult q_pb(const ClickDataset &dataset, double threshold = kDefaultThreshold);

/// <:m^k:> for N equal channels of efficiency eta and dark rate nu: exp(-k nu) G(1 - k eta / N).
double uniform_noclick_power(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu,
                             std::size_t k);

/// Sub-binomial parameter (N - 1) <:Var(m):> / (<:m:> (1 - <:m:>)) for N equal channels.
double q_b(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu);
/// Mandel Q = <:Var(n):> / <n>. Throws for the vacuum.
double mandel_q(const PhotonNumberDistribution &dist);

/// (<:m^{l+l'}:>)_{l,l'=0..floor(N/2)} and its smallest eigenvalue.
struct MomentMatrix {
    std::size_t dimension = 0;
    std::vector<double> entries;  // row-major
    double min_eigenvalue = 0.0;

    double at(std::size_t row, std::size_t col) const { return entries.at(row * dimension + col); }
};
MomentMatrix matrix_of_moments(const PhotonNumberDistribution &dist, std::size_t channels, double eta, double nu);
/// Smallest eigenvalue of a symmetric matrix given row-major.
double min_symmetric_eigenvalue(const std::vector<double> &entries, std::size_t dimension);

/// <:m^k:> - <:m:><:m^{k-1}:> and <:m^k:> - <:m:>^2 <:m^{k-2}:>, 3 <= k <= N.
struct AsymmetricConditions {
    double asymmetric = 0.0;
    double multipartition = 0.0;
};
AsymmetricConditions asymmetric_condition(const PhotonNumberDistribution &dist, std::size_t channels, double eta,
                                          double nu, std::size_t k);

/// Dataset versions of the equal-channel criteria. <:m^k:> is estimated by the average
/// no-click frequency over all k-channel blocks; errors use the first-order delta method.
CriterionResult q_b_estimate(const ClickDataset &dataset, double threshold = kDefaultThreshold);
CriterionResult matrix_of_moments_estimate(const ClickDataset &dataset, double threshold = kDefaultThreshold);
CriterionResult asymmetric_estimate(const ClickDataset &dataset, std::size_t k, double threshold = kDefaultThreshold);
CriterionResult multipartition_estimate(const ClickDataset &dataset, std::size_t k,
                                        double threshold = kDefaultThreshold);

/// Partition-condition values on `resamples` multinomial resamples of the histogram.
/// Resample r draws from PhiloxStream(seed, r, bootstrap).
std::vector<double> bootstrap_partition(const ClickDataset &dataset, const Partition &partition,
                                        std::size_t resamples, std::uint64_t seed);

}  // namespace clickcert

#endif
