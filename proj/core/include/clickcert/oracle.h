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

#ifndef CLICKCERT_ORACLE_H
#define CLICKCERT_ORACLE_H

#include <cstddef>
#include <span>
#include <vector>

#include "clickcert/channels.h"
#include "clickcert/network.h"
#include "clickcert/states.h"

namespace clickcert {

/// Numerical slack around the classical boundary for analytic values.
inline constexpr double kClassicalSlack = 1e-12;

/// Per-channel on-off detector response.
///
/// The default is the linear response Gamma_k(n) = eta_k n + nu_k, for which a channel that
/// receives n photons stays silent with probability (1 - eta_k)^n exp(-nu_k). Any other
/// monotone response can be supplied as a table q_k(n) of silent probabilities.
class DetectorModel {
   public:
    static DetectorModel linear(std::vector<double> eta, std::vector<double> nu);
    static DetectorModel uniform(std::size_t channels, double eta, double nu = 0.0);
    /// noclick[k][n] = q_k(n): in [0, 1], non-increasing in n. Tables must reach the largest
    /// photon number of any state they are used with.
    static DetectorModel tabulated(std::vector<std::vector<double>> noclick);

    std::size_t channels() const { return channels_; }
    bool is_linear() const { return table_.empty(); }
    /// Linear models only.
    std::span<const double> eta() const { return eta_; }
    std::span<const double> nu() const { return nu_; }
    /// All channels share eta and nu (linear models only).
    bool is_uniform() const;

    /// q_k(n), the probability channel k stays silent when n photons reach it.
    double noclick_probability(std::size_t channel, std::size_t photons) const;
    /// Largest n covered by a tabulated model; unbounded for linear models.
    std::size_t table_reach() const;

   private:
    DetectorModel() = default;
    std::size_t channels_ = 0;
    std::vector<double> eta_;
    std::vector<double> nu_;
    std::vector<std::vector<double>> table_;
};

/// Block exponent of a linear response: lambda = sum_k eta_k w_k and nu_sum = sum_k nu_k over
/// the block.
struct EffectiveAbsorption {
    double lambda = 0.0;
    double nu_sum = 0.0;
};

EffectiveAbsorption effective_absorption(ChannelSet block, const SplittingConfig &splitting,
                                         const DetectorModel &detectors);

/// <:m_I:> = exp(-nu_sum) G(1 - lambda), G the photon-number generating function.
///
/// For phase-insensitive light every normal-ordered no-click moment of a block reduces to
/// this single evaluation of the generating function.
double noclick_moment(const PhotonNumberDistribution &dist, EffectiveAbsorption absorption);

/// <:m_I:> for any detector model (tabulated responses go through multinomial routing).
double block_noclick(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                     const DetectorModel &detectors, ChannelSet block);

/// G(1 - joint) - prod_J G(1 - blocks[J]): a partition condition without dark counts, given
/// the absorbed fractions of each block and of their union. Evaluated in the no-click or the
/// click representation, whichever keeps the subtracted terms smaller.
double noise_free_condition(const PhotonNumberDistribution &dist, std::span<const double> block_absorptions,
                            double joint_absorption);

/// 1 - <:m_I:>, evaluated without cancellation for dim light.
double block_click(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                   const DetectorModel &detectors, ChannelSet block);

/// <:m_{I1} ... m_{IK}:> - prod_J <:m_{IJ}:>. Negative values certify nonclassical light.
///
/// For linear responses the dark-count factor exp(-sum nu) is pulled out exactly and the
/// remaining difference is evaluated in whichever of the no-click or click representation
/// keeps the subtracted terms smallest.
double partition_condition(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                           const DetectorModel &detectors, const Partition &partition);

/// Two-channel special case <:m_i m_j:> - <:m_i:><:m_j:>; i != j, 0-based.
double covariance_condition(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                            const DetectorModel &detectors, std::size_t i, std::size_t j);

/// <n_i n_j> - <n_i><n_j> = eta_i w_i eta_j w_j (<a^dag^2 a^2> - <n>^2); linear detectors only.
double photon_number_covariance(const PhotonNumberDistribution &dist, const SplittingConfig &splitting,
                                const DetectorModel &detectors, std::size_t i, std::size_t j);

/// Photon-added thermal states on a 70:30 splitter with efficiency 0.7 and no dark counts.
struct Fig2Row {
    double nbar = 0.0;
    double noclick_covariance = 0.0;  // two-channel no-click covariance
    double photon_covariance = 0.0;   // photon-number covariance
};

SplittingConfig fig2_splitting();
DetectorModel fig2_detectors();
std::vector<Fig2Row> fig2_curves(std::size_t added, std::span<const double> nbar_grid);

enum class Fig2Curve { noclick_covariance, photon_covariance };
/// Bisection for the sign change of the chosen curve inside [lo, hi]; the curve must be
/// negative at lo and non-negative at hi.
double fig2_crossing(std::size_t added, Fig2Curve curve, double lo, double hi, double tolerance = 1e-6);

}  // namespace clickcert

#endif
