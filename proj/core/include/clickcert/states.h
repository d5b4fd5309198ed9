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

#ifndef CLICKCERT_STATES_H
#define CLICKCERT_STATES_H

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clickcert {

/// Mass that the default truncation policy is allowed to discard.
inline constexpr double kTruncationTail = 1e-12;
/// Largest photon number a truncated distribution may keep.
inline constexpr std::size_t kMaxPhotonNumber = 4096;

/// Per-emitter photon-number emission probabilities for a cluster of M emitters.
struct EmitterSpec {
    std::size_t emitters = 1;
    double p0 = 0.0;
    double p1 = 1.0;
    double p2 = 0.0;

    /// Throws InvalidParameter unless M >= 1, p_i in [0,1] and p0+p1+p2 = 1 within 1e-12.
    void validate() const;
};

namespace detail {

/// One analytic family inside a (possibly mixed) generating function.
struct ClosedFormTerm {
    enum class Family { poisson, geometric, photon_added, fock, cluster };
    Family family = Family::fock;
    double weight = 1.0;
    double scale = 0.0;      // mean photons (poisson) or thermal mean (geometric, photon_added)
    std::size_t count = 0;   // Fock number, added photons, or emitters
    double p1 = 0.0;         // cluster only
    double p2 = 0.0;         // cluster only
};

}  // namespace detail

/// Photon-number statistics p_n of a phase-insensitive single-mode state.
///
/// Probabilities are stored truncated at max_photons(); tail_bound() is an upper bound on
/// the discarded mass. States built from the analytic families (coherent, thermal, Fock,
/// photon-added thermal, emitter clusters, and mixtures of those) also keep their
/// closed-form generating function, which is what the no-click moments are evaluated with.
/// Distributions built from raw probabilities fall back to series summation.
///
/// Immutable after construction.
class PhotonNumberDistribution {
   public:
    /// Arbitrary distribution; sum(probs) must lie in [1 - tail_bound, 1] up to 1e-12 rounding.
    static PhotonNumberDistribution from_probabilities(std::vector<double> probs, double tail_bound,
                                                       std::string label);

    std::span<const double> probs() const { return probs_; }
    double probability(std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    std::size_t max_photons() const { return probs_.size() - 1; }
    double tail_bound() const { return tail_bound_; }
    const std::string &label() const { return label_; }
    bool has_closed_form() const { return !terms_.empty(); }

    /// G(1 - absorbed) = sum_n p_n (1 - absorbed)^n for absorbed in [0, 1].
    double generating_function(double absorbed) const;
    /// 1 - G(1 - absorbed), computed without subtracting from one.
    double generating_complement(double absorbed) const;

    /// Series-only variants; ignore the closed form even when present.
    double series_generating_function(double absorbed) const;
    double series_generating_complement(double absorbed) const;

    /// <n(n-1)...(n-k+1)>; exact for closed forms, series sum otherwise.
    double factorial_moment(unsigned k) const;
    double mean() const { return factorial_moment(1); }

    /// Mixture with the given non-negative weights (summing to 1 within 1e-12).
    friend PhotonNumberDistribution mixture(
        std::span<const std::pair<double, PhotonNumberDistribution>> components);

   private:
    friend struct DistributionBuilder;
    PhotonNumberDistribution() = default;

    std::vector<double> probs_;
    double tail_bound_ = 0.0;
    std::string label_;
    std::vector<detail::ClosedFormTerm> terms_;
};

/// Poisson statistics of a coherent state; the phase is irrelevant for click statistics.
PhotonNumberDistribution coherent(double mean_photons);
/// Thermal state, p_k = nbar^k / (nbar + 1)^(k + 1).
PhotonNumberDistribution thermal(double nbar);
PhotonNumberDistribution fock(std::size_t n);
/// (a^dagger)^m rho_th a^m, renormalized.
PhotonNumberDistribution photon_added_thermal(std::size_t added, double nbar);
/// M independent emitters, each with photon numbers 0/1/2 drawn from (p0, p1, p2).
PhotonNumberDistribution emitter_cluster(const EmitterSpec &spec);
PhotonNumberDistribution mixture(std::span<const std::pair<double, PhotonNumberDistribution>> components);

/// Free-function spelling of dist.factorial_moment(k); k >= 1.
double factorial_moment(const PhotonNumberDistribution &dist, unsigned k);

}  // namespace clickcert

#endif
