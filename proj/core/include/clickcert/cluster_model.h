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

#ifndef CLICKCERT_CLUSTER_MODEL_H
#define CLICKCERT_CLUSTER_MODEL_H

#include <cstdint>
#include <vector>

namespace clickcert {

/// Predicted conditions for M single-photon emitters on a symmetric four-channel splitter
/// with overall efficiency eta.
///
/// Pair covariance: (1 - eta/2)^M - (1 - eta/4)^(2M).
double cov_model(std::uint64_t emitters, double eta);
/// Full four-block partition: (1 - eta)^M - (1 - eta/4)^(4M).
double full_model(std::uint64_t emitters, double eta);

inline constexpr std::uint64_t kMaxSweepEmitters = 1'000'000;

struct ClusterPoint {
    std::uint64_t emitters = 0;
    double cov_value = 0.0;
    double full_value = 0.0;
};

struct ClusterCurve {
    double eta = 0.0;
    std::vector<ClusterPoint> points;  // M = 1..M_max
};

ClusterCurve sweep(double eta, std::uint64_t max_emitters);

struct ClusterMinimum {
    std::uint64_t full_emitters = 0;
    double full_value = 0.0;
    std::uint64_t cov_emitters = 0;
    double cov_value = 0.0;
};

/// Argmin over M of both models. The scan stops once the value has risen for 8
/// consecutive steps past the best point. Requires 0 < eta <= 1.
ClusterMinimum find_min(double eta);

}  // namespace clickcert

#endif
