// Copyright 2026 The rwl1 Authors. All Rights Reserved.
//
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

#include "rwl1/cli.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gtest/gtest.h"

namespace rwl1::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("rwl1_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& contents = {}) const {
    const auto p = path_ / name;
    if (!contents.empty()) std::ofstream(p) << contents;
    return p.string();
  }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

double LastCsvField(const std::string& csv) {
  const auto body = csv.substr(0, csv.size() - 1);
  return std::stod(body.substr(body.rfind(',') + 1));
}

TEST(Cli, HelpDocumentsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"recover", {"--synthetic", "--input", "--n", "--m", "--k", "--distribution", "--seed",
                   "--omega", "--success-tol", "--output-prefix"}},
      {"threshold", {"--gamma1", "--f1", "--f2", "--omega", "--batch", "--counting", "--grid",
                     "--tol", "--output"}},
      {"weak-threshold", {"--delta", "--tol", "--grid", "--n"}},
      {"theorem3", {"--delta", "--omega", "--tol", "--grid"}},
      {"sweep", {"--config", "--n", "--m", "--k-grid", "--distribution", "--omega", "--trials",
                 "--seed", "--success-tol", "--threads", "--algorithms", "--out-dir"}},
      {"overlap", {"--n", "--m", "--k", "--distribution", "--seed", "--trials"}},
  };
  for (const auto& [cmd, list] : flags) {
    const auto r = Invoke({cmd, "--help"});
    EXPECT_EQ(r.code, kExitOk) << cmd;
    for (const auto& f : list) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << ' ' << f;
  }
  const auto top = Invoke({"--help"});
  EXPECT_EQ(top.code, kExitOk);
  for (const auto& [cmd, list] : flags) EXPECT_NE(top.out.find(cmd), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--synthetic", "--omega", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--synthetic", "--k", "abc", "--omega", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--k", "3", "--omega", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--synthetic", "--k", "3", "--omega", "0.5"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--synthetic", "--k", "3", "--omega", "2", "--distribution", "x"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"weak-threshold", "--delta", "1.0"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"overlap", "--k", "0"}).code, kExitUsage);
}

TEST(Recover, SyntheticBelowThreshold) {
  const auto r = Invoke({"recover", "--synthetic", "--n", "200", "--m", "112", "--k", "30",
                      "--distribution", "gaussian", "--omega", "3", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("first_pass: success=yes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("two_step: success=yes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("support_overlap: 30/30"), std::string::npos) << r.out;
}

TEST(Recover, KZeroIsUsageError) {
  const auto r = Invoke({"recover", "--synthetic", "--k", "0", "--omega", "3"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Recover, UnitOmegaMatchesPlain) {
  const auto r = Invoke({"recover", "--synthetic", "--k", "50", "--omega", "1"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("final_equals_first_pass: yes"), std::string::npos) << r.out;
}

TEST(Recover, Deterministic) {
  const std::vector<std::string> args = {"recover", "--synthetic", "--k", "52", "--omega", "5",
                                         "--seed", "3"};
  EXPECT_EQ(Invoke(args).out, Invoke(args).out);
}

TEST(Recover, InputFileAndOutputs) {
  TempDir dir;
  // A = [I2 | (1,1)], x = (0, 0, 2): y = (2, 2).
  const auto in = dir.file("p.txt", "# tiny\n2 3\n1 0 1\n0 1 1\n2 2\n0 0 2\n");
  const auto prefix = dir.str() + "/run";
  const auto r = Invoke({"recover", "--input", in, "--k", "1", "--omega", "4", "--output-prefix",
                      prefix});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("two_step: success=yes"), std::string::npos) << r.out;
  EXPECT_EQ(Slurp(prefix + "_support.txt"), "2\n");
  EXPECT_EQ(Slurp(prefix + "_xstar.txt"), "0\n0\n2\n");

  const auto no_truth = dir.file("q.txt", "2 3\n1 0 1\n0 1 1\n2 2\n");
  const auto q = Invoke({"recover", "--input", no_truth, "--k", "1", "--omega", "4"});
  ASSERT_EQ(q.code, kExitOk) << q.err;
  EXPECT_NE(q.out.find("two_step: l1_norm=2"), std::string::npos) << q.out;
}

TEST(Recover, MalformedInputIsUsageError) {
  TempDir dir;
  EXPECT_EQ(Invoke({"recover", "--input", dir.file("a.txt", "2 3\n1 0 1\n0 1\n"), "--k", "1",
                 "--omega", "2"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--input", dir.file("b.txt", "2 3\n1 0 x\n0 1 1\n2 2\n"), "--k",
                 "1", "--omega", "2"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--input", dir.str() + "/missing.txt", "--k", "1", "--omega", "2"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"recover", "--synthetic", "--input", dir.file("c.txt", "1 1\n1\n1\n"), "--k",
                 "1", "--omega", "2"}).code,
            kExitUsage);
}

TEST(Recover, InfeasibleSystemIsNumericalFailure) {
  TempDir dir;
  const auto in = dir.file("bad.txt", "2 2\n1 1\n2 2\n1 5\n");
  const auto r = Invoke({"recover", "--input", in, "--k", "1", "--omega", "2"});
  EXPECT_EQ(r.code, kExitNumerical) << r.out << r.err;
}

TEST(Threshold, SingleQueryRoundTripsWithWeakThreshold) {
  const auto r = Invoke({"threshold", "--gamma1", "0.2", "--f1", "1", "--f2", "0", "--omega", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("gamma1,f1,f2,omega,delta_c\n0.2,1,0,1,", 0), 0u) << r.out;
  const double delta = LastCsvField(r.out);
  const auto w = Invoke({"weak-threshold", "--delta", std::to_string(delta)});
  ASSERT_EQ(w.code, kExitOk);
  EXPECT_NEAR(LastCsvField(w.out), 0.2, 2e-4);
}

TEST(Threshold, TheoremConfigurationBelowDelta) {
  const auto w = Invoke({"weak-threshold", "--delta", "0.555"});
  const auto mu = std::to_string(LastCsvField(w.out));
  const auto r = Invoke({"threshold", "--gamma1", mu, "--f1", "1", "--f2", "0", "--omega", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LT(LastCsvField(r.out), 0.555);
}

TEST(Threshold, InvalidQueries) {
  EXPECT_EQ(Invoke({"threshold", "--gamma1", "0.2", "--f1", "1.5", "--f2", "0", "--omega", "1"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--gamma1", "1.2", "--f1", "1", "--f2", "0", "--omega", "1"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--gamma1", "0.2", "--f1", "1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--gamma1", "0.2", "--f1", "1", "--f2", "0", "--omega", "1",
                 "--grid", "50"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--gamma1", "0.2", "--f1", "1", "--f2", "0", "--omega", "1",
                 "--counting", "some"}).code,
            kExitUsage);
}

TEST(Threshold, Batch) {
  TempDir dir;
  const auto batch = dir.file("q.csv", "gamma1,f1,f2,omega\n0.25,1,0,1\n0.25,1,0,10\n");
  const auto out = dir.str() + "/t.csv";
  ASSERT_EQ(Invoke({"threshold", "--batch", batch, "--output", out}).code, kExitOk);
  const auto text = Slurp(out);
  EXPECT_EQ(text.rfind("gamma1,f1,f2,omega,delta_c\n0.25,1,0,1,0.58", 0), 0u) << text;
  EXPECT_NE(text.find("\n0.25,1,0,10,0.26"), std::string::npos) << text;

  EXPECT_EQ(Invoke({"threshold", "--batch", dir.file("bad.csv", "a,b\n1,2\n")}).code, kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--batch", dir.file("short.csv", "gamma1,f1,f2,omega\n0.2,1,0\n")})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"threshold", "--batch", batch, "--omega", "2"}).code, kExitUsage);
}

TEST(WeakThreshold, PrintsMuAndK) {
  const auto r = Invoke({"weak-threshold", "--delta", "0.5555", "--n", "200"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("delta,mu_w,k\n0.5555,", 0), 0u) << r.out;
  const double k = LastCsvField(r.out);
  EXPECT_GE(k, 40.0);
  EXPECT_LE(k, 50.0);
}

TEST(Theorem3, Table) {
  const auto r = Invoke({"theorem3", "--delta", "0.555", "--omega", "1", "10"});
  ASSERT_EQ(r.code, kExitOk);
  std::istringstream lines(r.out);
  std::string header, one, ten;
  std::getline(lines, header);
  std::getline(lines, one);
  std::getline(lines, ten);
  EXPECT_EQ(header, "delta,omega,mu_w,delta_c,margin,pass");
  EXPECT_TRUE(one.ends_with(",fail")) << one;
  EXPECT_TRUE(ten.ends_with(",pass")) << ten;
}

TEST(Sweep, SmokeAndByteIdenticalReruns) {
  TempDir dir;
  const auto config = dir.file("s.conf", "n = 40\nm = 24\nk_grid = 4:12:4\ntrials_per_k = 5\n"
                                         "omega = 3\nseed = 11\n");
  const auto a = dir.str() + "/a";
  const auto b = dir.str() + "/b";
  const auto ra = Invoke({"sweep", "--config", config, "--out-dir", a});
  const auto rb = Invoke({"sweep", "--config", config, "--out-dir", b, "--threads", "2"});
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk) << rb.err;
  EXPECT_EQ(Slurp(a + "/trials.csv"), Slurp(b + "/trials.csv"));
  EXPECT_EQ(Slurp(a + "/summary.csv"), Slurp(b + "/summary.csv"));
  EXPECT_NE(ra.out.find("omega,crossover_plain,crossover_two_step\n3,"), std::string::npos);

  const auto one = Invoke({"sweep", "--trials", "1", "--k-grid", "30", "--omega", "3", "--out-dir",
                        dir.str() + "/c"});
  ASSERT_EQ(one.code, kExitOk) << one.err;
  EXPECT_EQ(Slurp(dir.str() + "/c/summary.csv"),
            "distribution,n,m,omega,k,rate_plain,rate_two_step,mean_overlap\n"
            "gaussian,200,112,3,30,1,1,1\n");
}

TEST(Sweep, InvalidConfig) {
  TempDir dir;
  EXPECT_EQ(Invoke({"sweep", "--config", dir.file("x.conf", "k_grid = 5\nwat = 1\n"), "--out-dir",
                 dir.str()}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"sweep", "--n", "100", "--out-dir", dir.str()}).code, kExitUsage);
  EXPECT_EQ(Invoke({"sweep", "--k-grid", "10", "--m", "5", "--n", "4", "--out-dir", dir.str()}).code,
            kExitUsage);
}

TEST(Overlap, ReportsLowerBound) {
  const std::vector<std::string> args = {"overlap", "--k", "55", "--trials", "3", "--seed", "4"};
  const auto r = Invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("trial,k,overlap_count,overlap_fraction,l1_error,w_at_error,lower_bound\n",
                        0),
            0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_EQ(r.out, Invoke(args).out);
}

}  // namespace
}  // namespace rwl1::cli
