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

#ifndef CLICKCERT_CRITERIA_H
#define CLICKCERT_CRITERIA_H

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "clickcert/channels.h"
#include "clickcert/estimate.h"
#include "clickcert/network.h"
#include "clickcert/oracle.h"
#include "clickcert/simulate.h"
#include "clickcert/states.h"

namespace clickcert {

/// Block no-click moments from either the exact oracle or a dataset. Copies share one
/// memo table, so repeated queries for a block return the same answer.
class MomentSource {
   public:
    enum class Kind { analytic, empirical };

    static MomentSource analytic(PhotonNumberDistribution state, SplittingConfig splitting, DetectorModel detectors);
    static MomentSource empirical(ClickDataset dataset);

    Kind kind() const;
    std::size_t channels() const;
    /// Memoized; std_error is 0 for analytic sources. Thread-safe.
    MomentEstimate block(ChannelSet block) const;

    /// Exactly one of these is non-null, matching kind().
    const ClickDataset *dataset() const;
    const PhotonNumberDistribution *state() const;
    const SplittingConfig *splitting() const;
    const DetectorModel *detectors() const;

   private:
    struct Impl;
    explicit MomentSource(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<Impl> impl_;
};

std::string_view to_string(MomentSource::Kind kind);

/// Two-channel covariance condition; 0-based channels.
struct PairCondition {
    std::size_t first = 0;
    std::size_t second = 1;
    bool operator==(const PairCondition &) const = default;
};

struct NamedCondition {
    enum class Kind { q_pb, q_b, mandel_q, matrix_of_moments, asymmetric, multipartition };
    Kind kind = Kind::q_pb;
    std::size_t order = 0;  // k for asymmetric / multipartition
    bool operator==(const NamedCondition &) const = default;
};

using Condition = std::variant<Partition, PairCondition, NamedCondition>;

/// Accepted forms: partition syntax ("1,2|3|4"), "pair i j" (1-based), "q_pb", "q_b",
/// "mandel_q", "matrix_of_moments", "asymmetric k", "multipartition k".
Condition parse_condition(std::string_view text);
std::string format_condition(const Condition &condition);

struct BlockMomentEntry {
    ChannelSet block;
    MomentEstimate moment;
};

struct CertificationReport {
    nlohmann::ordered_json configuration = nlohmann::ordered_json::object();
    MomentSource::Kind source = MomentSource::Kind::analytic;
    std::size_t channels = 0;
    std::uint64_t pulses = 0;
    double threshold = kDefaultThreshold;
    std::vector<CriterionResult> results;  // same order as the conditions
    /// Every block moment the partition and pair conditions touched, ordered by mask.
    std::vector<BlockMomentEntry> moments;
    /// Index into results of the largest significance (ties: most negative value), if any
    /// result has positive significance.
    std::optional<std::size_t> best_violation;
    double wall_seconds = 0.0;
};

/// Evaluates each condition in order. Named equal-channel criteria on an analytic source
/// require uniform splitting and detectors; mandel_q requires an analytic source.
CertificationReport certify(const MomentSource &source, const std::vector<Condition> &conditions,
                            double threshold = kDefaultThreshold);

/// Evaluates one condition.
CriterionResult evaluate_condition(const MomentSource &source, const Condition &condition,
                                   double threshold = kDefaultThreshold);

/// All partitions of the first `channels` channels with at least 2 blocks, ranked by
/// significance (empirical) or by value (analytic). Stable: ties keep enumeration order.
std::vector<std::pair<Partition, CriterionResult>> rank_partitions(const MomentSource &source, std::size_t channels,
                                                                   double threshold = kDefaultThreshold);

inline constexpr std::size_t kMaxRankChannels = 8;

/// JSON report: {"configuration", "source", "channels", "pulses", "threshold", "results",
/// "moments", "best_violation"}. Non-finite significances are written as null. The wall
/// time is left out so reruns produce identical bytes.
std::string report_json(const CertificationReport &report);
/// label,value,stderr,significance,verdict rows with 17 significant digits.
std::string report_csv(const CertificationReport &report);
nlohmann::ordered_json result_json(const CriterionResult &result);

}  // namespace clickcert

#endif
