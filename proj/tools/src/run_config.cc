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

#include "run_config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "clickcert/errors.h"

namespace clickcert::cli {
namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string &key, const std::string &what) {
    throw InvalidParameter("config key '" + key + "': " + what);
}

void allow_keys(const json &j, const std::string &where, std::initializer_list<const char *> keys) {
    if (!j.is_object()) {
        bad(where, "expected an object");
    }
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto &item : j.items()) {
        if (!allowed.count(item.key())) {
            bad(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
        }
    }
}

double get_real(const json &j, const std::string &key) {
    if (!j.is_number()) {
        bad(key, "expected a number");
    }
    return j.get<double>();
}

std::uint64_t get_unsigned(const json &j, const std::string &key) {
    if (j.is_number_unsigned()) {
        return j.get<std::uint64_t>();
    }
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    bad(key, "expected a non-negative integer");
}

bool get_bool(const json &j, const std::string &key) {
    if (!j.is_boolean()) {
        bad(key, "expected true or false");
    }
    return j.get<bool>();
}

std::string get_string(const json &j, const std::string &key) {
    if (!j.is_string()) {
        bad(key, "expected a string");
    }
    return j.get<std::string>();
}

double real_or(const json &j, const char *key, double fallback, const std::string &where) {
    return j.contains(key) ? get_real(j.at(key), where + "." + key) : fallback;
}

std::uint64_t unsigned_or(const json &j, const char *key, std::uint64_t fallback, const std::string &where) {
    return j.contains(key) ? get_unsigned(j.at(key), where + "." + key) : fallback;
}

ordered normalize_state_at(const json &state, const std::string &where) {
    if (!state.is_object() || !state.contains("type")) {
        bad(where, "expected an object with a 'type'");
    }
    const std::string type = get_string(state.at("type"), where + ".type");
    ordered out;
    out["type"] = type;
    if (type == "coherent") {
        allow_keys(state, where, {"type", "mean"});
        out["mean"] = real_or(state, "mean", 1.0, where);
    } else if (type == "thermal") {
        allow_keys(state, where, {"type", "nbar"});
        out["nbar"] = real_or(state, "nbar", 1.0, where);
    } else if (type == "fock") {
        allow_keys(state, where, {"type", "n"});
        out["n"] = unsigned_or(state, "n", 1, where);
    } else if (type == "photon_added_thermal") {
        allow_keys(state, where, {"type", "added", "nbar"});
        out["added"] = unsigned_or(state, "added", 1, where);
        out["nbar"] = real_or(state, "nbar", 1.0, where);
    } else if (type == "emitter_cluster") {
        allow_keys(state, where, {"type", "emitters", "p0", "p1", "p2"});
        out["emitters"] = unsigned_or(state, "emitters", 14, where);
        out["p0"] = real_or(state, "p0", 0.0, where);
        out["p1"] = real_or(state, "p1", 1.0, where);
        out["p2"] = real_or(state, "p2", 0.0, where);
    } else if (type == "mixture") {
        allow_keys(state, where, {"type", "components"});
        if (!state.contains("components") || !state.at("components").is_array() || state.at("components").empty()) {
            bad(where + ".components", "expected a non-empty list");
        }
        out["components"] = ordered::array();
        std::size_t i = 0;
        for (const auto &c : state.at("components")) {
            std::string at = where + ".components[" + std::to_string(i++) + "]";
            allow_keys(c, at, {"weight", "state"});
            if (!c.contains("weight") || !c.contains("state")) {
                bad(at, "needs 'weight' and 'state'");
            }
            ordered entry;
            entry["weight"] = get_real(c.at("weight"), at + ".weight");
            entry["state"] = normalize_state_at(c.at("state"), at + ".state");
            out["components"].push_back(entry);
        }
    } else {
        bad(where + ".type", "unknown state type '" + type + "'");
    }
    return out;
}

}  // namespace

ordered normalize_state(const json &state) { return normalize_state_at(state, "state"); }

PhotonNumberDistribution build_state(const json &raw) {
    ordered s = normalize_state(raw);
    const std::string type = s["type"];
    if (type == "coherent") {
        return coherent(s["mean"].get<double>());
    }
    if (type == "thermal") {
        return thermal(s["nbar"].get<double>());
    }
    if (type == "fock") {
        return fock(s["n"].get<std::size_t>());
    }
    if (type == "photon_added_thermal") {
        return photon_added_thermal(s["added"].get<std::size_t>(), s["nbar"].get<double>());
    }
    if (type == "emitter_cluster") {
        EmitterSpec spec;
        spec.emitters = s["emitters"].get<std::size_t>();
        spec.p0 = s["p0"].get<double>();
        spec.p1 = s["p1"].get<double>();
        spec.p2 = s["p2"].get<double>();
        return emitter_cluster(spec);
    }
    std::vector<std::pair<double, PhotonNumberDistribution>> parts;
    for (const auto &c : s["components"]) {
        parts.emplace_back(c["weight"].get<double>(), build_state(json::parse(c["state"].dump())));
    }
    return mixture(parts);
}

std::size_t RunConfig::channels() const { return symmetric ? *symmetric : weights.size(); }

SplittingConfig RunConfig::make_splitting() const {
    if (symmetric) {
        return SplittingConfig::symmetric(*symmetric, loss_weight);
    }
    return SplittingConfig::make(weights, loss_weight);
}

DetectorModel RunConfig::make_detectors() const {
    const std::size_t n = channels();
    if (detectors.empty()) {
        return DetectorModel::uniform(n, 1.0, 0.0);
    }
    if (detectors.size() != n) {
        throw InvalidParameter("config lists " + std::to_string(detectors.size()) + " detectors for " +
                               std::to_string(n) + " channels");
    }
    std::vector<double> eta, nu;
    for (const auto &d : detectors) {
        eta.push_back(d.eta);
        nu.push_back(d.nu);
    }
    return DetectorModel::linear(std::move(eta), std::move(nu));
}

PhotonNumberDistribution RunConfig::make_state() const { return build_state(json::parse(state.dump())); }

ordered RunConfig::to_json() const {
    ordered j;
    j["command"] = command;
    j["state"] = state;
    ordered split;
    if (symmetric) {
        split["symmetric"] = *symmetric;
    } else {
        split["weights"] = weights;
    }
    split["loss_weight"] = loss_weight;
    j["splitting"] = split;
    j["detectors"] = ordered::array();
    const std::size_t n = channels();
    for (std::size_t k = 0; k < n; ++k) {
        DetectorEntry d = detectors.empty() ? DetectorEntry{} : detectors.at(k);
        j["detectors"].push_back({{"eta", d.eta}, {"nu", d.nu}});
    }
    j["pulses"] = pulses;
    j["seed"] = seed;
    j["chunk_size"] = chunk_size;
    j["conditions"] = conditions;
    j["threshold"] = threshold;
    j["input"] = input;
    j["output"] = output;
    j["rank_channels"] = rank_channels;
    j["fig2"] = {{"added", fig2.added},
                 {"nbar_min", fig2.nbar_min},
                 {"nbar_max", fig2.nbar_max},
                 {"nbar_step", fig2.nbar_step},
                 {"scale", fig2.scale}};
    j["sweep"] = {{"eta", sweep.eta}, {"max_emitters", sweep.max_emitters}, {"scale_1e4", sweep.scale_1e4}};
    return j;
}

RunConfig apply_json(RunConfig c, const json &j) {
    allow_keys(j, "", {"command", "state", "splitting", "detectors", "pulses", "seed", "chunk_size", "conditions",
                       "threshold", "input", "output", "rank_channels", "fig2", "sweep"});
    if (j.contains("command")) {
        c.command = get_string(j.at("command"), "command");
    }
    if (j.contains("state")) {
        c.state = normalize_state(j.at("state"));
    }
    if (j.contains("splitting")) {
        const json &s = j.at("splitting");
        allow_keys(s, "splitting", {"symmetric", "weights", "loss_weight"});
        if (s.contains("symmetric") == s.contains("weights")) {
            bad("splitting", "give exactly one of 'symmetric' or 'weights'");
        }
        if (s.contains("symmetric")) {
            c.symmetric = get_unsigned(s.at("symmetric"), "splitting.symmetric");
            c.weights.clear();
        } else {
            if (!s.at("weights").is_array()) {
                bad("splitting.weights", "expected a list of numbers");
            }
            c.symmetric.reset();
            c.weights.clear();
            for (const auto &w : s.at("weights")) {
                c.weights.push_back(get_real(w, "splitting.weights"));
            }
        }
        c.loss_weight = real_or(s, "loss_weight", 0.0, "splitting");
    }
    if (j.contains("detectors")) {
        const json &d = j.at("detectors");
        c.detectors.clear();
        if (d.is_object()) {
            allow_keys(d, "detectors", {"eta", "nu"});
            DetectorEntry e{real_or(d, "eta", 1.0, "detectors"), real_or(d, "nu", 0.0, "detectors")};
            c.detectors.assign(c.channels(), e);
        } else if (d.is_array()) {
            for (const auto &e : d) {
                allow_keys(e, "detectors[]", {"eta", "nu"});
                c.detectors.push_back({real_or(e, "eta", 1.0, "detectors[]"), real_or(e, "nu", 0.0, "detectors[]")});
            }
        } else {
            bad("detectors", "expected a list of {eta, nu} or one {eta, nu} for all channels");
        }
    }
    if (j.contains("pulses")) {
        c.pulses = get_unsigned(j.at("pulses"), "pulses");
    }
    if (j.contains("seed")) {
        c.seed = get_unsigned(j.at("seed"), "seed");
    }
    if (j.contains("chunk_size")) {
        c.chunk_size = get_unsigned(j.at("chunk_size"), "chunk_size");
    }
    if (j.contains("conditions")) {
        if (!j.at("conditions").is_array()) {
            bad("conditions", "expected a list of strings");
        }
        c.conditions.clear();
        for (const auto &s : j.at("conditions")) {
            c.conditions.push_back(get_string(s, "conditions"));
        }
    }
    if (j.contains("threshold")) {
        c.threshold = get_real(j.at("threshold"), "threshold");
    }
    if (j.contains("input")) {
        c.input = get_string(j.at("input"), "input");
    }
    if (j.contains("output")) {
        c.output = get_string(j.at("output"), "output");
    }
    if (j.contains("rank_channels")) {
        c.rank_channels = get_unsigned(j.at("rank_channels"), "rank_channels");
    }
    if (j.contains("fig2")) {
        const json &f = j.at("fig2");
        allow_keys(f, "fig2", {"added", "nbar_min", "nbar_max", "nbar_step", "scale"});
        c.fig2.added = unsigned_or(f, "added", c.fig2.added, "fig2");
        c.fig2.nbar_min = real_or(f, "nbar_min", c.fig2.nbar_min, "fig2");
        c.fig2.nbar_max = real_or(f, "nbar_max", c.fig2.nbar_max, "fig2");
        c.fig2.nbar_step = real_or(f, "nbar_step", c.fig2.nbar_step, "fig2");
        if (f.contains("scale")) {
            c.fig2.scale = get_bool(f.at("scale"), "fig2.scale");
        }
    }
    if (j.contains("sweep")) {
        const json &s = j.at("sweep");
        allow_keys(s, "sweep", {"eta", "max_emitters", "scale_1e4"});
        c.sweep.eta = real_or(s, "eta", c.sweep.eta, "sweep");
        c.sweep.max_emitters = unsigned_or(s, "max_emitters", c.sweep.max_emitters, "sweep");
        if (s.contains("scale_1e4")) {
            c.sweep.scale_1e4 = get_bool(s.at("scale_1e4"), "sweep.scale_1e4");
        }
    }
    return c;
}

RunConfig load_config(const std::string &path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    std::stringstream text;
    text << in.rdbuf();
    json j;
    try {
        j = json::parse(text.str());
    } catch (const json::parse_error &e) {
        throw ParseError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return apply_json(std::move(base), j);
}

RunConfig preset(const std::string &name, std::optional<std::uint64_t> emitters, std::optional<double> eta_total) {
    RunConfig c;
    if (name == "fig2") {
        if (emitters || eta_total) {
            throw InvalidParameter("--M and --eta apply to the cluster-experiment preset only");
        }
        c.state = {{"type", "photon_added_thermal"}, {"added", 1}, {"nbar", 1.0}};
        c.symmetric.reset();
        c.weights = {0.7, 0.3};
        c.detectors.assign(2, DetectorEntry{0.7, 0.0});
        c.conditions = {"pair 1 2"};
        return c;
    }
    if (name == "cluster-experiment") {
        const std::uint64_t m = emitters.value_or(14);
        const double eta = eta_total.value_or(0.009);
        c.state = {{"type", "emitter_cluster"}, {"emitters", m}, {"p0", 1.0 - eta}, {"p1", eta}, {"p2", 0.0}};
        c.symmetric = 4;
        c.detectors.assign(4, DetectorEntry{1.0, 0.0});
        c.pulses = 10'000'000;
        c.conditions = {"pair 1 3", "1|2|3|4"};
        c.sweep.eta = eta;
        c.sweep.max_emitters = m;
        return c;
    }
    throw InvalidParameter("unknown preset '" + name + "' (expected fig2 or cluster-experiment)");
}

}  // namespace clickcert::cli
