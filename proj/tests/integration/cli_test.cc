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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "clickcert/simulate.h"
#include "commands.h"

namespace clickcert::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "clickcert");
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("clickcert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    std::string write(const std::string &name, const std::string &text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    fs::path dir_;
};

TEST_F(Cli, VacuumGivesNoClicks) {
    std::string cfg = write("vac.json", R"({"state": {"type": "fock", "n": 0}, "pulses": 1000})");
    Outcome r = cli({"simulate", "--config", cfg, "--out", path("vac.hist")});
    ASSERT_EQ(r.code, 0) << r.err;
    ClickDataset d = read_dataset(path("vac.hist"));
    EXPECT_EQ(d.pulses(), 1000u);
    EXPECT_EQ(d.count(ClickPattern{}), 1000u);
    EXPECT_EQ(d.mean_clicks(), 0.0);
}

TEST_F(Cli, ClusterPresetMeanClicks) {
    Outcome r = cli({"simulate", "--preset", "cluster-experiment", "--M", "14", "--eta", "0.006", "--pulses",
                     "1000000", "--out", path("c.hist")});
    ASSERT_EQ(r.code, 0) << r.err;
    double mean = read_dataset(path("c.hist")).mean_clicks();
    EXPECT_GE(mean, 0.05);
    EXPECT_LE(mean, 0.1);
}

TEST_F(Cli, SimulateIsReproducible) {
    std::vector<std::string> base{"simulate", "--preset", "cluster-experiment", "--pulses", "300000"};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return a;
    };
    ASSERT_EQ(cli(with({"--seed", "42", "--threads", "1", "--out", path("a.hist")})).code, 0);
    ASSERT_EQ(cli(with({"--seed", "42", "--threads", "1", "--out", path("b.hist")})).code, 0);
    ASSERT_EQ(cli(with({"--seed", "42", "--threads", "8", "--out", path("c.hist")})).code, 0);
    EXPECT_EQ(slurp(path("a.hist")), slurp(path("b.hist")));
    EXPECT_EQ(slurp(path("a.hist")), slurp(path("c.hist")));
    ASSERT_EQ(cli(with({"--seed", "43", "--out", path("d.hist")})).code, 0);
    EXPECT_NE(slurp(path("a.hist")), slurp(path("d.hist")));

    Outcome again = cli({"simulate", "--config", path("a.hist.manifest.json"), "--out", path("e.hist")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(slurp(path("a.hist")), slurp(path("e.hist")));
}

TEST_F(Cli, CertifyDatasetWritesReports) {
    ASSERT_EQ(cli({"simulate", "--preset", "cluster-experiment", "--pulses", "200000", "--out", path("d.hist")}).code,
              0);
    Outcome r = cli({"certify", "--dataset", path("d.hist"), "--out", path("rep")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(slurp(path("rep.json")));
    EXPECT_EQ(j["source"], "empirical");
    EXPECT_EQ(j["pulses"], 200000);
    ASSERT_EQ(j["results"].size(), 7u);
    EXPECT_EQ(j["results"][0]["label"], "pair 1 2");
    EXPECT_EQ(j["results"][6]["label"], "1|2|3|4");
    auto csv = lines(slurp(path("rep.csv")));
    ASSERT_EQ(csv.size(), 8u);
    EXPECT_EQ(csv[0], "label,value,stderr,significance,verdict");
    EXPECT_TRUE(fs::exists(path("rep.manifest.json")));

    Outcome stdout_run = cli({"certify", "--dataset", path("d.hist"), "--condition", "q_pb", "--condition", "1,2|3,4"});
    ASSERT_EQ(stdout_run.code, 0) << stdout_run.err;
    auto k = nlohmann::json::parse(stdout_run.out);
    ASSERT_EQ(k["results"].size(), 2u);
    EXPECT_EQ(k["results"][1]["label"], "1,2|3,4");

    Outcome again = cli({"certify", "--config", path("rep.manifest.json"), "--out", path("rep2")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(slurp(path("rep.csv")), slurp(path("rep2.csv")));
}

TEST_F(Cli, CoherentAnalyticIsInconclusive) {
    std::string cfg = write("coh.json", R"({"state": {"type": "coherent", "mean": 2.0},
        "detectors": [{"eta": 0.6, "nu": 0.01}, {"eta": 0.6, "nu": 0.01}, {"eta": 0.6, "nu": 0.01},
                      {"eta": 0.6, "nu": 0.01}]})");
    Outcome r = cli({"certify", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["source"], "analytic");
    for (const auto &res : j["results"]) {
        EXPECT_EQ(res["verdict"], "inconclusive");
        EXPECT_NEAR(res["value"].get<double>(), 0.0, 1e-14);
    }
    EXPECT_TRUE(j["best_violation"].is_null());
}

TEST_F(Cli, ClusterSweepHasFourteenRows) {
    Outcome r = cli({"cluster-sweep", "--scale-1e4"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 15u);
    EXPECT_EQ(rows[0], "M,cov_value,full_value");
    EXPECT_EQ(rows[14].substr(0, 3), "14,");
    Outcome e = cli({"cluster-sweep", "--eta", "0.05", "--M", "3", "--out", path("s.csv")});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(lines(slurp(path("s.csv"))).size(), 4u);
    EXPECT_TRUE(fs::exists(path("s.csv.manifest.json")));
}

TEST_F(Cli, Fig2CrossingOrder) {
    for (const char *added : {"1", "2"}) {
        Outcome r = cli({"fig2", "--added", added, "--nbar-min", "0", "--nbar-max", "3", "--nbar-step", "0.01"});
        ASSERT_EQ(r.code, 0) << r.err;
        auto rows = lines(r.out);
        ASSERT_EQ(rows[0], "nbar,eq4_value,eq6_value");
        double cross4 = -1.0, cross6 = -1.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            std::istringstream in(rows[i]);
            std::string a, b, c;
            std::getline(in, a, ',');
            std::getline(in, b, ',');
            std::getline(in, c, ',');
            if (cross4 < 0 && std::stod(b) >= 0) cross4 = std::stod(a);
            if (cross6 < 0 && std::stod(c) >= 0) cross6 = std::stod(a);
        }
        EXPECT_GT(cross6, 0.0);
        EXPECT_GT(cross4, cross6) << "added " << added;
    }
}

TEST_F(Cli, RankQuotesPartitions) {
    Outcome r = cli({"rank", "--preset", "fig2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "rank,partition,value,stderr,significance,verdict");
    std::string cfg = write("f1.json", R"({"state": {"type": "fock", "n": 1}})");
    Outcome f = cli({"rank", "--config", cfg});
    ASSERT_EQ(f.code, 0) << f.err;
    auto frows = lines(f.out);
    ASSERT_EQ(frows.size(), 15u);
    EXPECT_EQ(frows[1].substr(0, 10), "1,1|2|3|4,");
    EXPECT_NE(f.out.find("\"1,2|3,4\""), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate"}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--dataset", path("missing.hist")}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--condition", "1|9"}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--M", "3"}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--preset", "nope"}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--config", write("bad.json", "{\"pulsez\": 3}")}).code, kExitUsage);
    EXPECT_EQ(cli({"certify", "--config", write("broken.json", "{")}).code, kExitUsage);
    EXPECT_EQ(cli({"fig2", "--added", "3"}).code, kExitUsage);
    Outcome wrong = cli({"simulate", "--config", write("c.json", R"({"command": "certify"})"), "--out", path("x")});
    EXPECT_EQ(wrong.code, kExitUsage);
    EXPECT_FALSE(wrong.err.empty());
    EXPECT_EQ(cli({"certify", "--dataset", write("garbage.hist", "not a dataset\n")}).code, kExitUsage);
    EXPECT_EQ(cli({"cluster-sweep", "--help"}).code, kExitOk);
}

}  // namespace
}  // namespace clickcert::cli
