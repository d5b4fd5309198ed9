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

#include "commands.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <thread>

#include "clickcert/cluster_model.h"
#include "clickcert/criteria.h"
#include "clickcert/errors.h"
#include "clickcert/format.h"
#include "clickcert/simulate.h"
#include "run_config.h"

namespace clickcert::cli {
namespace {

struct Flags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> emitters;
    std::optional<double> eta;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> pulses;
    std::optional<std::uint64_t> chunk_size;
    std::string out;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> conditions;
    std::string dataset;
    std::optional<double> threshold;
    bool scale_fig2 = false;
    bool scale_1e4 = false;
    std::optional<std::size_t> added;
    std::optional<double> nbar_min;
    std::optional<double> nbar_max;
    std::optional<double> nbar_step;
    std::optional<std::size_t> rank_channels;
};

constexpr std::size_t kMaxGridPoints = 1'000'000;

void write_text(const std::string &path, const std::string &text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot write '" + path + "'");
    }
    file << text;
    if (!file.flush()) {
        throw IoError("cannot write '" + path + "'");
    }
}

void write_manifest(const RunConfig &config, const std::string &base) {
    write_text(base + ".manifest.json", config.to_json().dump(2) + "\n");
}

// Output text goes to --out when given, else to the terminal.
void emit(const RunConfig &config, const std::string &text, std::ostream &out) {
    if (config.output.empty()) {
        out << text;
        return;
    }
    write_text(config.output, text);
    write_manifest(config, config.output);
}

RunConfig resolve(const std::string &command, const Flags &f) {
    RunConfig c;
    const bool cluster_sweep = command == "cluster-sweep";
    if (!f.preset.empty()) {
        c = preset(f.preset, f.emitters, f.eta);
    } else if ((f.emitters || f.eta) && !cluster_sweep) {
        throw InvalidParameter("--M and --eta need --preset cluster-experiment");
    }
    if (!f.config.empty()) {
        c = load_config(f.config, std::move(c));
    }
    if (!c.command.empty() && c.command != command) {
        throw InvalidParameter("config was written for '" + c.command + "', not '" + command + "'");
    }
    c.command = command;
    if (f.seed) c.seed = *f.seed;
    if (f.pulses) c.pulses = *f.pulses;
    if (f.chunk_size) c.chunk_size = *f.chunk_size;
    if (!f.out.empty()) c.output = f.out;
    if (!f.conditions.empty()) c.conditions = f.conditions;
    if (!f.dataset.empty()) c.input = f.dataset;
    if (f.threshold) c.threshold = *f.threshold;
    if (f.scale_fig2) c.fig2.scale = true;
    if (f.scale_1e4) c.sweep.scale_1e4 = true;
    if (f.added) c.fig2.added = *f.added;
    if (f.nbar_min) c.fig2.nbar_min = *f.nbar_min;
    if (f.nbar_max) c.fig2.nbar_max = *f.nbar_max;
    if (f.nbar_step) c.fig2.nbar_step = *f.nbar_step;
    if (f.rank_channels) c.rank_channels = *f.rank_channels;
    if (cluster_sweep) {
        if (f.eta) c.sweep.eta = *f.eta;
        if (f.emitters) c.sweep.max_emitters = *f.emitters;
    }
    return c;
}

MomentSource make_source(RunConfig &config) {
    if (!config.input.empty()) {
        return MomentSource::empirical(read_dataset(config.input));
    }
    return MomentSource::analytic(config.make_state(), config.make_splitting(), config.make_detectors());
}

std::vector<Condition> resolve_conditions(RunConfig &config, std::size_t channels) {
    if (config.conditions.empty()) {
        for (std::size_t i = 0; i < channels; ++i) {
            for (std::size_t j = i + 1; j < channels; ++j) {
                config.conditions.push_back(format_condition(PairCondition{i, j}));
            }
        }
        if (channels > 2) {
            config.conditions.push_back(format_partition(full_partition(channels)));
        }
    }
    std::vector<Condition> out;
    for (const auto &text : config.conditions) {
        out.push_back(parse_condition(text));
    }
    return out;
}

int cmd_simulate(RunConfig config, unsigned threads, std::ostream &out) {
    if (config.output.empty()) {
        throw InvalidParameter("simulate needs --out <path>");
    }
    SimulationPlan plan{config.make_state(), config.make_splitting(), config.make_detectors(), config.pulses,
                        config.seed, config.chunk_size, 0};
    ClickDataset data = sample_dataset(plan, threads);
    write_dataset(data, config.output);
    write_manifest(config, config.output);
    out << "wrote " << data.pulses() << " pulses on " << data.channels() << " channels to " << config.output
        << " (mean clicks per pulse " << format_double(data.mean_clicks()) << ")\n";
    return kExitOk;
}

int cmd_certify(RunConfig config, std::ostream &out) {
    MomentSource source = make_source(config);
    std::vector<Condition> conditions = resolve_conditions(config, source.channels());
    CertificationReport report = certify(source, conditions, config.threshold);
    report.configuration = config.to_json();
    std::string json = report_json(report);
    if (config.output.empty()) {
        out << json;
        return kExitOk;
    }
    write_text(config.output + ".json", json);
    write_text(config.output + ".csv", report_csv(report));
    write_manifest(config, config.output);
    return kExitOk;
}

int cmd_fig2(const RunConfig &config, std::ostream &out) {
    const Fig2Params &p = config.fig2;
    if (!(p.nbar_step > 0.0) || !(p.nbar_min >= 0.0) || !(p.nbar_max >= p.nbar_min) || !std::isfinite(p.nbar_max)) {
        throw InvalidParameter("fig2 range needs 0 <= nbar_min <= nbar_max and nbar_step > 0");
    }
    const double span = (p.nbar_max - p.nbar_min) / p.nbar_step;
    if (span + 1.0 > static_cast<double>(kMaxGridPoints)) {
        throw InvalidParameter("fig2 grid exceeds " + std::to_string(kMaxGridPoints) + " points");
    }
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = p.nbar_min + static_cast<double>(i) * p.nbar_step;
    }
    const double scale = p.scale ? 5.0 : 1.0;
    std::string csv = "nbar,eq4_value,eq6_value\n";
    for (const Fig2Row &row : fig2_curves(p.added, grid)) {
        csv += format_double(row.nbar) + "," + format_double(scale * row.noclick_covariance) + "," +
               format_double(row.photon_covariance) + "\n";
    }
    emit(config, csv, out);
    return kExitOk;
}

int cmd_cluster_sweep(const RunConfig &config, std::ostream &out) {
    ClusterCurve curve = sweep(config.sweep.eta, config.sweep.max_emitters);
    const double scale = config.sweep.scale_1e4 ? 1e4 : 1.0;
    std::string csv = "M,cov_value,full_value\n";
    for (const ClusterPoint &pt : curve.points) {
        csv += std::to_string(pt.emitters) + "," + format_double(scale * pt.cov_value) + "," +
               format_double(scale * pt.full_value) + "\n";
    }
    emit(config, csv, out);
    return kExitOk;
}

int cmd_rank(RunConfig config, std::ostream &out) {
    MomentSource source = make_source(config);
    std::size_t n = config.rank_channels == 0 ? source.channels() : config.rank_channels;
    config.rank_channels = n;
    auto ranked = rank_partitions(source, n, config.threshold);
    std::string csv = "rank,partition,value,stderr,significance,verdict\n";
    std::size_t r = 1;
    for (const auto &[partition, result] : ranked) {
        csv += std::to_string(r++) + "," + csv_field(format_partition(partition)) + "," + format_double(result.value) + "," +
               format_double(result.std_error) + "," + format_double(result.significance) + "," +
               std::string(to_string(result.verdict)) + "\n";
    }
    emit(config, csv, out);
    return kExitOk;
}

void add_common(CLI::App *sub, Flags &f) {
    sub->add_option("--config", f.config, "JSON run configuration (a manifest works too)");
    sub->add_option("--preset", f.preset, "fig2 | cluster-experiment");
    sub->add_option("--M", f.emitters, "emitter count for the cluster preset");
    sub->add_option("--eta", f.eta, "overall efficiency for the cluster preset");
    sub->add_option("--out", f.out, "output path");
}

void add_source(CLI::App *sub, Flags &f) {
    sub->add_option("--dataset", f.dataset, "CLICKHIST file; omit for the analytic oracle");
    sub->add_option("--condition", f.conditions, "condition, repeatable: '1,2|3|4', 'pair 1 3', q_pb, ...");
    sub->add_option("--threshold", f.threshold, "significance needed for a nonclassical verdict");
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Click-counting nonclassicality certification", "clickcert"};
    app.require_subcommand(1);
    Flags f;

    CLI::App *simulate = app.add_subcommand("simulate", "sample a click dataset");
    add_common(simulate, f);
    simulate->add_option("--seed", f.seed, "64-bit seed");
    simulate->add_option("--pulses", f.pulses, "number of pulses");
    simulate->add_option("--chunk-size", f.chunk_size, "pulses per random stream");
    simulate->add_option("--threads", f.threads, "worker threads (does not change results)");

    CLI::App *cert = app.add_subcommand("certify", "evaluate conditions on a dataset or the oracle");
    add_common(cert, f);
    add_source(cert, f);

    CLI::App *fig2 = app.add_subcommand("fig2", "two-channel curves for photon-added thermal light");
    add_common(fig2, f);
    fig2->add_option("--added", f.added, "added photons (1 or 2)");
    fig2->add_option("--nbar-min", f.nbar_min, "first thermal mean");
    fig2->add_option("--nbar-max", f.nbar_max, "last thermal mean");
    fig2->add_option("--nbar-step", f.nbar_step, "grid step");
    fig2->add_flag("--scale-fig2", f.scale_fig2, "multiply the no-click covariance by 5");

    CLI::App *cluster = app.add_subcommand("cluster-sweep", "emitter-cluster model over M = 1..M_max");
    add_common(cluster, f);
    cluster->add_flag("--scale-1e4", f.scale_1e4, "multiply values by 1e4");

    CLI::App *rank = app.add_subcommand("rank", "rank all partitions by violation");
    add_common(rank, f);
    add_source(rank, f);
    rank->add_option("--channels", f.rank_channels, "rank partitions of the first n channels");

    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rest);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            if (f.threads == 0) {
                throw InvalidParameter("--threads must be at least 1");
            }
            return cmd_simulate(resolve("simulate", f), f.threads, out);
        }
        if (cert->parsed()) {
            return cmd_certify(resolve("certify", f), out);
        }
        if (fig2->parsed()) {
            return cmd_fig2(resolve("fig2", f), out);
        }
        if (cluster->parsed()) {
            return cmd_cluster_sweep(resolve("cluster-sweep", f), out);
        }
        return cmd_rank(resolve("rank", f), out);
    } catch (const InvalidParameter &e) {
        err << "clickcert: " << e.what() << "\n";
        return kExitUsage;
    } catch (const clickcert::ParseError &e) {
        err << "clickcert: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError &e) {
        err << "clickcert: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "clickcert: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace clickcert::cli
