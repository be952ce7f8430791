/* Copyright 2026 The darkpath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace darkpath {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "darkpath");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("darkpath_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, GateReportsSmallDistance) {
  const auto r = run({"gate", "--name", "Z3", "--out", path("z3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = io::read_json_file(path("z3.json"));
  EXPECT_LT(doc.at("distance").get<double>(), 1e-4);
  EXPECT_LT(doc.at("target_distance").get<double>(), 1e-12);
  EXPECT_NE(r.out.find("distance(analytic, simulated)"), std::string::npos);
}

TEST_F(CliTest, GateCsvAndProgramFile) {
  const auto prog = write("x3.json", io::to_json(named_gate("X3").program).dump());
  const auto r = run({"gate", "--program", prog, "--format", "csv", "--out", path("x3.csv"), "--eta", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("x3.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "matrix,row,col,re,im");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 2 * 9);  // analytic and simulated; no named target
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"gate", "--name", "Q3"}).code, 2);
  EXPECT_EQ(run({"gate"}).code, 2);
  EXPECT_EQ(run({"gate", "--name", "X3", "--program", "p.json"}).code, 2);
  EXPECT_EQ(run({"gate", "--name", "X3", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  const auto bad = write("bad.json", "{\n  \"name\": \"X3\",,\n}");
  const auto r = run({"gate", "--config", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.json:2:"), std::string::npos) << r.err;
}

TEST_F(CliTest, SweepCsvRoundTrips) {
  const auto r = run({"sweep", "--samples", "5", "--grid", "-0.1,0,0.1", "--gates", "X3,Z3", "--out", path("s.csv"),
                      "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("s.csv"));
  const auto sweep = io::read_sweep_csv(in);
  ASSERT_EQ(sweep.rows.size(), 12u);
  for (const auto& row : sweep.rows) {
    if (row.delta == 0.0) EXPECT_NEAR(row.mean_fidelity, 1.0, 1e-4);
  }
}

TEST_F(CliTest, SweepConfigAndFlagsOverride) {
  const auto cfg = write("cfg.json", R"({"gates": ["T3"], "deltas": [0.05], "samples": 3, "format": "json",
                                        "seed": 9, "etas": [4]})");
  const auto r = run({"sweep", "--config", cfg, "--out", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = io::sweep_from_json(io::read_json_file(path("a.json")));
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_EQ(a.rows[0].samples, 3);
  const auto again = run({"sweep", "--config", cfg, "--out", path("b.json")});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
  const auto over = run({"sweep", "--config", cfg, "--samples", "4", "--out", path("c.json")});
  ASSERT_EQ(over.code, 0);
  EXPECT_EQ(io::sweep_from_json(io::read_json_file(path("c.json"))).rows[0].samples, 4);
}

TEST_F(CliTest, TraceWritesTrajectory) {
  const auto r = run({"trace", "--name", "H3", "--state", "uniform", "--points", "50", "--out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("t.csv"));
  const auto table = io::read_numeric_csv(in);
  EXPECT_EQ(table.rows.size(), 99u);
  EXPECT_NEAR(table.rows.back()[table.column("population_g1")], 1.0, 1e-3);
  EXPECT_NEAR(table.rows.back()[table.column("time_over_tau")], 2.0, 1e-12);
}

TEST_F(CliTest, TraceStateParsing) {
  EXPECT_EQ(run({"trace", "--name", "X3", "--state", "0,1,1", "--points", "5", "--format", "json"}).code, 0);
  EXPECT_EQ(run({"trace", "--name", "X3", "--state", "1:1,0,0", "--points", "5"}).code, 0);
  EXPECT_EQ(run({"trace", "--name", "X3", "--state", "0,0,0"}).code, 2);
  EXPECT_EQ(run({"trace", "--name", "X3", "--state", "1,1"}).code, 2);
  EXPECT_EQ(run({"trace", "--name", "X3", "--state", "basis4"}).code, 2);
  EXPECT_EQ(run({"trace", "--name", "X3"}).code, 2);
  const QuditState s = cli::parse_state("basis2", 3);
  EXPECT_EQ(s.amplitudes()(1), Complex(1.0));
}

TEST_F(CliTest, SolveFourier) {
  const auto target = write("h3.json", io::matrix_to_json(qutrit_fourier()).dump());
  const auto r = run({"solve", "--target", target, "--loops", "2", "--out", path("p.json")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto doc = io::read_json_file(path("p.json"));
  EXPECT_TRUE(doc.at("converged").get<bool>());
  const auto program = io::program_from_json(doc);
  EXPECT_LT(gate_distance(compose(program).matrix(), qutrit_fourier()), 1e-6);
}

TEST_F(CliTest, SolveReportsNonConvergence) {
  const auto target = write("h3.json", io::matrix_to_json(qutrit_fourier()).dump());
  const auto r = run({"solve", "--target", target, "--loops", "1", "--restarts", "2", "--max-evals", "200", "--out",
                      path("p.json")});
  EXPECT_EQ(r.code, 1);
  const auto doc = io::read_json_file(path("p.json"));
  EXPECT_FALSE(doc.at("converged").get<bool>());
  EXPECT_GT(doc.at("distance").get<double>(), 1e-6);
  const auto bad = write("bad.json", "[[1, 1], [1, 1]]");
  EXPECT_EQ(run({"solve", "--target", bad}).code, 2);
}

TEST_F(CliTest, TwoQuditBlockReport) {
  const auto r = run({"two-qudit", "--name", "Z3", "--out", path("tq.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = io::read_json_file(path("tq.json"));
  EXPECT_LT(doc.at("report").at("off_block_max").get<double>(), 1e-4);
  EXPECT_LT(doc.at("report").at("target_block_max").get<double>(), 1e-4);
}

TEST_F(CliTest, TwoQuditIdentityAndLaser) {
  const GateProgram identity{3, {LoopParams::identity(3, 4.0)}, "I"};
  const auto prog = write("id.json", io::to_json(identity).dump());
  LaserConfig laser;
  laser.omega0 = 1.0;
  laser.omegas.assign(5, 1.0);
  laser.phases.assign(6, 0.0);
  const auto lp = write("laser.json", io::to_json(laser).dump());
  const auto r = run({"two-qudit", "--program", prog, "--laser", lp, "--out", path("id_out.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = io::read_json_file(path("id_out.json"));
  EXPECT_LT(doc.at("report").at("identity_deviation").get<double>(), 1e-6);
  EXPECT_NEAR(doc.at("laser").at("k").get<double>(), 0.01 / 99.0, 1e-15);

  laser.omegas.assign(9, 1.0);
  laser.phases.assign(10, 0.0);
  const auto lp4 = write("laser4.json", io::to_json(laser).dump());
  EXPECT_EQ(run({"two-qudit", "--program", prog, "--laser", lp4}).code, 2);
}

}  // namespace
}  // namespace darkpath
