// Copyright 2026 The pairfair Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pairfair/cli.hpp"
#include "support.hpp"

namespace pairfair {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pairfair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string run_config(const fs::path& out_dir, const std::string& extra) {
  return "data.simulate = two_group\ndata.queries = 200\ndata.seed = 3\nsplit.seed = 1\n"
         "solver.iterations = 200\nsolver.snapshots = 100\nsolver.step_grid = 0.05\n"
         "output.dir = " + out_dir.string() + "\n" + extra;
}

TEST(Simulate, WritesRowsAndMetadata) {
  const auto dir = testing::temp_dir("cli_sim");
  const Outcome r = cli({"simulate", "two_group", "--seed", "7", "--out",
                         (dir / "a.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(lines_of(slurp(dir / "a.csv")).size(), 55001u);
  const std::string meta = slurp(dir / "a.csv.meta");
  EXPECT_NE(meta.find("generator=two_group"), std::string::npos);
  EXPECT_NE(meta.find("seed=7"), std::string::npos);
  EXPECT_NE(meta.find("rows=55000"), std::string::npos);

  ASSERT_EQ(cli({"simulate", "two_group", "--seed", "7", "--out", (dir / "b.csv").string()})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Simulate, RejectsBadArguments) {
  const auto dir = testing::temp_dir("cli_sim_bad");
  EXPECT_EQ(cli({"simulate", "five_group", "--out", (dir / "x.csv").string()}).code,
            kExitConfig);
  EXPECT_EQ(cli({"simulate", "two_group"}).code, kExitConfig);
  EXPECT_EQ(cli({"bogus"}).code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "x.csv"));
}

TEST(Train, WritesArtifactsAndRoundTrips) {
  const auto dir = testing::temp_dir("cli_train");
  write(dir / "run.cfg", run_config(dir / "out", "fairness.criterion = cross_group_eo\n"));
  const Outcome r = cli({"train", "--config", (dir / "run.cfg").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"model.txt", "runlog.tsv", "hyperparameters.txt", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const auto log = lines_of(slurp(dir / "out" / "runlog.tsv"));
  ASSERT_EQ(log.size(), 101u);

  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary["method"], "unconstrained");
  EXPECT_EQ(summary["atoms"], 1);

  const Outcome ev = cli({"evaluate", "--config", (dir / "run.cfg").string(), "--split",
                          "validation"});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const json report = json::parse(ev.out);
  EXPECT_EQ(report["expected"]["auc"], summary["validation"]["expected"]["auc"]);
  EXPECT_EQ(report["expected"]["matrix"], summary["validation"]["expected"]["matrix"]);
  EXPECT_NE(ev.err.find("better"), std::string::npos);

  // The unconstrained model is the last iterate, so the last log line agrees.
  std::vector<std::string> fields;
  std::istringstream last(log.back());
  for (std::string f; std::getline(last, f, '\t');) fields.push_back(f);
  ASSERT_EQ(fields.size(), 6u);
  EXPECT_EQ(fields[0], "200");
  EXPECT_NEAR(std::stod(fields[3]), report["expected"]["auc"].get<double>(), 1e-6);
}

TEST(Train, ConstrainedReportHasAtoms) {
  const auto dir = testing::temp_dir("cli_constrained");
  write(dir / "run.cfg",
        run_config(dir / "out", "method = constrained\nfairness.criterion = cross_group_eo\n"
                                "fairness.epsilon = 0.05\n"));
  const Outcome r = cli({"train", "--config", (dir / "run.cfg").string()});
  ASSERT_TRUE(r.code == kExitOk || r.code == kExitFallback) << r.err;
  const Outcome ev = cli({"evaluate", "--config", (dir / "run.cfg").string(), "--out",
                          (dir / "eval.json").string()});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const json report = json::parse(slurp(dir / "eval.json"));
  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  ASSERT_EQ(report["atoms"].size(), summary["atoms"].get<std::size_t>());
  double total = 0;
  for (const json& a : report["atoms"]) {
    total += a["probability"].get<double>();
    EXPECT_TRUE(a.contains("matrix"));
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_EQ(report["expected"]["auc"], summary["test"]["expected"]["auc"]);
}

TEST(Train, IncompatibleCriterionFailsBeforeTraining) {
  const auto dir = testing::temp_dir("cli_incompatible");
  write(dir / "run.cfg", run_config(dir / "out",
                                    "method = constrained\nfairness.criterion = continuous_eo\n"));
  const Outcome r = cli({"train", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "out"));
  write(dir / "bad.cfg", "data.simulate = two_group\nsolver.iters = 3\n");
  const Outcome b = cli({"train", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(b.code, kExitConfig);
  EXPECT_NE(b.err.find("solver.iters"), std::string::npos);
  EXPECT_EQ(cli({"train", "--config", (dir / "missing.cfg").string()}).code, kExitConfig);
}

TEST(Evaluate, ScoreColumnOracleGivesPerfectMatrix) {
  const auto dir = testing::temp_dir("cli_oracle");
  ASSERT_EQ(cli({"simulate", "two_group", "--queries", "300", "--seed", "2", "--out",
                 (dir / "sim.csv").string()})
                .code,
            kExitOk);
  // Append a score column equal to the label.
  const auto rows = lines_of(slurp(dir / "sim.csv"));
  std::ofstream csv(dir / "oracle.csv");
  csv << rows[0] << ",oracle\n";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string label = rows[i].substr(rows[i].find(',') + 1,
                                             rows[i].find(',', rows[i].find(',') + 1) -
                                                 rows[i].find(',') - 1);
    csv << rows[i] << ',' << label << '\n';
  }
  csv.close();
  write(dir / "run.cfg",
        "data.path = oracle.csv\ndata.query = query_id\ndata.group = group\ndata.groups = 2\n"
        "fairness.criterion = cross_group_eo\n");
  const Outcome r = cli({"evaluate", "--config", (dir / "run.cfg").string(), "--split", "all",
                         "--score-column", "oracle"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["auc"], 1.0);
  for (const json& row : j["matrix"]) {
    for (const json& v : row) {
      if (!v.is_null()) EXPECT_EQ(v, 1.0);
    }
  }
  EXPECT_EQ(j["violations"]["cross_group_eo"], 0.0);
}

TEST(Evaluate, DimensionMismatchIsDataError) {
  const auto dir = testing::temp_dir("cli_mismatch");
  write(dir / "run.cfg", run_config(dir / "out", ""));
  ASSERT_EQ(cli({"train", "--config", (dir / "run.cfg").string()}).code, kExitOk);
  std::string csv = "label,group,f0,f1,f2\n";
  for (int i = 0; i < 12; ++i) {
    csv += std::to_string(i % 2) + "," + std::to_string(i % 3 % 2) + ",1,2,3\n";
  }
  write(dir / "wide.csv", csv);
  write(dir / "wide.cfg", "data.path = wide.csv\ndata.group = group\ndata.groups = 2\n");
  const Outcome r = cli({"evaluate", "--config", (dir / "wide.cfg").string(), "--model",
                         (dir / "out" / "model.txt").string()});
  EXPECT_EQ(r.code, kExitData) << r.err;
  EXPECT_EQ(cli({"evaluate", "--config", (dir / "run.cfg").string(), "--split", "dev"}).code,
            kExitConfig);
}

TEST(Report, SortedRowsAndMalformedLogs) {
  const auto dir = testing::temp_dir("cli_report");
  write(dir / "u.cfg", run_config(dir / "runs" / "u", "fairness.criterion = cross_group_eo\n"));
  write(dir / "c.cfg", run_config(dir / "runs" / "c",
                                  "method = constrained\nfairness.criterion = cross_group_eo\n"
                                  "fairness.epsilon = 0.05\n"));
  ASSERT_EQ(cli({"train", "--config", (dir / "u.cfg").string()}).code, kExitOk);
  const int c = cli({"train", "--config", (dir / "c.cfg").string()}).code;
  ASSERT_TRUE(c == kExitOk || c == kExitFallback);

  const Outcome r = cli({"report", (dir / "runs").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines_of(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rfind("constrained\t", 0), 0u);
  EXPECT_EQ(rows[1].rfind("unconstrained\t", 0), 0u);
  const json s = json::parse(slurp(dir / "runs" / "u" / "summary.json"));
  const double auc = s["test"]["expected"]["auc"];
  const double viol = s["test"]["expected"]["violations"]["cross_group_eo"];
  char expect[64];
  std::snprintf(expect, sizeof expect, "unconstrained\t%.2f (%.2f)", auc, viol);
  EXPECT_EQ(rows[1], expect);

  write(dir / "runs" / "c" / "runlog.tsv", "iteration\tlambda\n1\tx\n");
  const Outcome bad = cli({"report", (dir / "runs").string()});
  EXPECT_NE(bad.code, kExitOk);
  EXPECT_NE(bad.out.find("MALFORMED"), std::string::npos);
  EXPECT_NE(cli({"report", (dir / "nowhere").string()}).code, kExitOk);
}

TEST(Binary, ExitCodesPropagate) {
  const char* bin = std::getenv("PAIRFAIR_CLI");
  if (bin == nullptr) GTEST_SKIP() << "PAIRFAIR_CLI not set";
  const auto dir = testing::temp_dir("cli_binary");
  const std::string base = std::string(bin) + " ";
  EXPECT_EQ(std::system((base + "--help > /dev/null").c_str()), 0);
  const int code = std::system((base + "simulate nope --out " + (dir / "x.csv").string() +
                                " 2> /dev/null")
                                   .c_str());
  ASSERT_TRUE(WIFEXITED(code));
  EXPECT_EQ(WEXITSTATUS(code), kExitConfig);
}

}  // namespace
}  // namespace pairfair
