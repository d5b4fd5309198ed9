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

#ifndef CLICKCERT_TOOLS_RUN_CONFIG_H
#define CLICKCERT_TOOLS_RUN_CONFIG_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clickcert/network.h"
#include "clickcert/oracle.h"
#include "clickcert/states.h"

namespace clickcert::cli {

struct DetectorEntry {
    double eta = 1.0;
    double nu = 0.0;
};

struct Fig2Params {
    std::size_t added = 1;
    double nbar_min = 0.0;
    double nbar_max = 3.0;
    double nbar_step = 0.05;
    bool scale = false;
};

struct SweepParams {
    double eta = 0.009;
    std::uint64_t max_emitters = 14;
    bool scale_1e4 = false;
};

/// Fully resolved run description. Every field has a default, so the JSON form written to
/// a manifest is complete and can be fed back as --config.
struct RunConfig {
    std::string command;
    nlohmann::ordered_json state = {{"type", "coherent"}, {"mean", 1.0}};
    std::optional<std::size_t> symmetric = 4;
    std::vector<double> weights;
    double loss_weight = 0.0;
    std::vector<DetectorEntry> detectors;  // empty: eta 1, nu 0 on every channel
    std::uint64_t pulses = 1'000'000;
    std::uint64_t seed = 0;
    std::uint64_t chunk_size = 65536;
    std::vector<std::string> conditions;
    double threshold = 3.0;
    std::string input;
    std::string output;
    std::size_t rank_channels = 0;  // 0: all channels of the source
    Fig2Params fig2;
    SweepParams sweep;

    std::size_t channels() const;
    SplittingConfig make_splitting() const;
    DetectorModel make_detectors() const;
    PhotonNumberDistribution make_state() const;

    /// Resolved form; detectors are expanded to one entry per channel.
    nlohmann::ordered_json to_json() const;
};

/// Overlays the keys present in `j` on `base`. Unknown keys and ill-typed values throw
/// InvalidParameter naming the offending key.
RunConfig apply_json(RunConfig base, const nlohmann::json &j);
RunConfig load_config(const std::string &path, RunConfig base);

/// Validates a state description and fills in defaults.
nlohmann::ordered_json normalize_state(const nlohmann::json &state);
PhotonNumberDistribution build_state(const nlohmann::json &state);

/// Named starting points: "fig2" and "cluster-experiment". `emitters` and `eta_total`
/// override the cluster preset's M = 14 and 0.009.
RunConfig preset(const std::string &name, std::optional<std::uint64_t> emitters,
                 std::optional<double> eta_total);

}  // namespace clickcert::cli

#endif
