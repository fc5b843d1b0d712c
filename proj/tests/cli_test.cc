// Copyright 2026 The qmerkle Authors
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

#include "qmt/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmt/records.h"

namespace qmt {
namespace {

namespace fs = std::filesystem;

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qmt");
    std::vector<char *> argv;
    for (auto &a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    return run_main(static_cast<int>(args.size()), argv.data());
}

class Cli : public ::testing::Test {
   protected:
    fs::path out_ = fs::temp_directory_path() /
                    ("qmt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));

    void TearDown() override {
        fs::remove(out_.string() + ".csv");
        fs::remove(out_.string() + ".jsonl");
    }

    std::string path(const char *ext) const { return out_.string() + ext; }

    std::string slurp(const std::string &p) const {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    RecordSet records(std::vector<std::string> args, OutputFormat f = OutputFormat::kCsv) {
        const std::string p = path(f == OutputFormat::kCsv ? ".csv" : ".jsonl");
        args.insert(args.end(), {"--output", p, "--format", f == OutputFormat::kCsv ? "csv" : "jsonl"});
        EXPECT_EQ(run(args), 0);
        std::ifstream in(p);
        return parse_records(in, f);
    }
};

TEST_F(Cli, SolvePinning) {
    const auto r = records({"solve-instance", "--instance", "pinning_4q.json"});
    EXPECT_EQ(r.summary["lambda_min"].get<double>(), 0.0);
    EXPECT_EQ(r.summary["classification"], "yes");
    EXPECT_EQ(r.summary["label"], "yes");
}

TEST_F(Cli, SolveCalibratedNo) {
    const auto r = records({"solve-instance", "--instance", "calibrated_no_4q.json"});
    EXPECT_NEAR(r.summary["lambda_min_over_m"].get<double>(), 0.9, 1e-9);
    EXPECT_EQ(r.summary["classification"], "no");
}

TEST_F(Cli, RoundtripRestoresPayload) {
    const auto r = records({"roundtrip", "--trials", "5", "--seed", "4"});
    ASSERT_EQ(r.rows.size(), 5U);
    for (const auto &row : r.rows) {
        EXPECT_FALSE(row["bot"].get<bool>());
        EXPECT_GE(row["fidelity"].get<double>(), 1 - 1e-9);
    }
    EXPECT_EQ(r.summary["bot_count"], 0);
}

TEST_F(Cli, OutputIsDeterministic) {
    const std::vector<std::string> args = {"run-protocol", "--instance", "frustrated_4q.json", "--strategy",
                                           "semi-honest-ground", "--trials", "30", "--seed", "9", "--output",
                                           path(".csv")};
    ASSERT_EQ(run(args), 0);
    const std::string first = slurp(path(".csv"));
    ASSERT_EQ(run(args), 0);
    EXPECT_EQ(slurp(path(".csv")), first);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    ASSERT_EQ(run(threaded), 0);
    std::istringstream first_stream(first);
    const auto a = parse_records(first_stream, OutputFormat::kCsv);
    std::ifstream in(path(".csv"));
    const auto b = parse_records(in, OutputFormat::kCsv);
    EXPECT_EQ(a.rows, b.rows);
}

TEST_F(Cli, CsvAndJsonlCarryTheSameRecords) {
    const std::vector<std::string> args = {"attack-phase", "--oracle", "haar", "--trials", "20", "--seed", "5"};
    const auto csv = records(args, OutputFormat::kCsv);
    const auto jsonl = records(args, OutputFormat::kJsonl);
    EXPECT_EQ(csv.columns, jsonl.columns);
    ASSERT_EQ(csv.rows.size(), jsonl.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        for (const auto &c : csv.columns) EXPECT_EQ(csv.rows[i][c], jsonl.rows[i][c]);
    }
    EXPECT_EQ(csv.summary, jsonl.summary);
}

TEST_F(Cli, RunProtocolColumns) {
    const auto r = records({"run-protocol", "--instance", "pinning_4q.json", "--strategy", "honest", "--trials", "3",
                            "--ell", "4"});
    const std::vector<std::string> want = {"seed",        "trial",    "i",        "decommit_pass", "fail_node",
                                           "accepted",    "qubits_sent", "prover_G", "prover_Ginv", "verifier_Ginv"};
    EXPECT_EQ(r.columns, want);
    for (const auto &row : r.rows) {
        EXPECT_TRUE(row["accepted"].get<bool>());
        EXPECT_EQ(row["prover_G"], 3);
    }
    EXPECT_EQ(r.summary["acceptance_rate"].get<double>(), 1.0);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"no-such-command"}), 2);
    EXPECT_EQ(run({"roundtrip", "--b", "0", "--output", path(".csv")}), 2);
    EXPECT_EQ(run({"roundtrip", "--oracle", "circuit:x", "--output", path(".csv")}), 2);
    EXPECT_EQ(run({"roundtrip", "--ell", "3", "--output", path(".csv")}), 2);
    EXPECT_EQ(run({"run-protocol", "--instance", "missing.json", "--output", path(".csv")}), 2);
    EXPECT_EQ(run({"run-protocol", "--instance", "pinning_4q.json", "--trials", "0", "--output", path(".csv")}), 2);
    // (2,8) needs more qubits than the default cap.
    EXPECT_EQ(run({"run-protocol", "--instance", "pinning_4q.json", "--ell", "8", "--trials", "1", "--max-qubits",
                   "20", "--output", path(".csv")}),
              2);
    EXPECT_EQ(run({"run-protocol", "--instance", "pinning_4q.json", "--ell", "8", "--trials", "1", "--max-qubits",
                   "32", "--output", path(".csv")}),
              0);
}

TEST_F(Cli, ValidateRejectsBrokenInstance) {
    const std::string bad = path(".jsonl");
    std::ofstream(bad) << R"({"n_qubits":2,"alpha":0.1,"beta":0.9,"k":1,"terms":[{"qubits":[3],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}]})";
    EXPECT_EQ(run({"validate-instance", "--instance", bad}), 2);
    EXPECT_EQ(run({"validate-instance", "--instance", "frustrated_4q.json", "--output", path(".csv")}), 0);
}

TEST_F(Cli, HaarStatsReportsMoments) {
    const auto r = records({"haar-stats", "--qubits", "2", "--samples", "400"});
    EXPECT_NEAR(r.summary["haar_abs2_u00"].get<double>(), 0.25, 1e-15);
    EXPECT_LE(r.summary["max_unitarity_defect"].get<double>(), 1e-12);
}

}  // namespace
}  // namespace qmt
