#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "ltlzinc/csv.hpp"

namespace fs = std::filesystem;
using ltlzinc::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& leaf) {
  auto p = fs::temp_directory_path() / ("ltlzinc_cli_" + leaf);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, CompileReportsStateCounts) {
  auto r = invoke({"compile", "task1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("states: 8\n"), std::string::npos) << r.out;
  r = invoke({"compile", "task6"});
  EXPECT_NE(r.out.find("states: 4\n"), std::string::npos);
  const auto dir = scratch("compile");
  r = invoke({"compile", "task5", "-o", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "dfa.json"));
  fs::remove_all(dir);
}

TEST(Cli, MalformedYamlIsUsageErrorWithLocation) {
  const auto dir = scratch("yaml");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.yaml") << "domains: {d: {range: [0, 3]}}\nvariables: {A: d}\n"
                                     "constraints: {p: A + = 1}\nformula: F p\n";
  const auto r = invoke({"compile", (dir / "bad.yaml").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.yaml:3:"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"compile", "no-such-task"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, YamlSpecCompilesAndGenerates) {
  const auto dir = scratch("yamlok");
  fs::create_directories(dir);
  std::ofstream(dir / "t.yaml") << "name: mini\ndomains: {d: {range: [0, 3]}}\n"
                                   "variables: {A: d, B: d}\nconstraints: {p: A < B}\n"
                                   "formula: F p\nlength: {min: 2, max: 4}\n"
                                   "splits: {train: 6, val: 2, test: 2}\n";
  auto r = invoke({"compile", (dir / "t.yaml").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("states: 2\n"), std::string::npos);
  r = invoke({"generate", (dir / "t.yaml").string(), "-o", (dir / "ds").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("train: 6 sequences, 3 positive"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(Cli, GenerateDefaultShapeAndDeterminism) {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  auto r = invoke({"generate", "task3", "-o", a.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(invoke({"generate", "task3", "-o", b.string(), "--jobs", "3"}).code, 0);
  EXPECT_EQ(slurp(a / "dataset.csv"), slurp(b / "dataset.csv"));
  EXPECT_EQ(slurp(a / "dataset.json"), slurp(b / "dataset.json"));

  const auto rows = ltlzinc::parse_csv(slurp(a / "dataset.csv"));
  std::map<std::string, std::set<std::string>> seqs;
  std::set<std::pair<std::string, std::string>> closed;
  std::pair<std::string, std::string> current;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::pair<std::string, std::string> key{rows[i][0], rows[i][1]};
    if (key != current) {
      // Rows of one sequence are contiguous.
      EXPECT_FALSE(closed.count(key));
      closed.insert(current);
      current = key;
    }
    seqs[rows[i][0]].insert(rows[i][1]);
  }
  EXPECT_EQ(seqs["train"].size(), 320u);
  EXPECT_EQ(seqs["val"].size(), 40u);
  EXPECT_EQ(seqs["test"].size(), 40u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, PositiveRatioFlag) {
  const auto dir = scratch("ratio");
  const auto r = invoke({"generate", "task4", "-o", dir.string(), "--positive-ratio", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("train: 320 sequences, 288 positive"), std::string::npos) << r.out;
  EXPECT_EQ(invoke({"generate", "task4", "-o", dir.string(), "--positive-ratio", "1.5"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, InferPerfectAndEngineSchema) {
  const auto dir = scratch("infer");
  ASSERT_EQ(invoke({"generate", "task1", "-o", (dir / "ds").string()}).code, 0);
  auto r = invoke({"infer", (dir / "ds").string(), "--engine", "exact", "--oracle", "perfect",
                   "-o", (dir / "m").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("task1,exact,ic+cc,perfect,0,12345,,1.000000,1.000000,1.000000,1.000000"),
            std::string::npos)
      << r.out;
  EXPECT_TRUE(fs::exists(dir / "m" / "metrics.json"));

  const auto fuzzy = invoke({"infer", (dir / "ds").string(), "-e", "fuzzy-p", "--oracle", "flip", "-p", "0.1"});
  const auto sdd = invoke({"infer", (dir / "ds").string(), "-e", "sddnnf-p", "--oracle", "flip", "-p", "0.1"});
  ASSERT_EQ(fuzzy.code, 0);
  ASSERT_EQ(sdd.code, 0);
  const auto fr = ltlzinc::parse_csv(fuzzy.out), sr = ltlzinc::parse_csv(sdd.out);
  ASSERT_EQ(fr.size(), 2u);
  EXPECT_EQ(fr[0], sr[0]);
  EXPECT_EQ(fr[1].size(), sr[1].size());

  r = invoke({"infer", (dir / "ds").string(), "--engine", "neural"});
  EXPECT_EQ(r.code, 2);
  for (const char* e : {"exact", "fuzzy-p", "fuzzy-lp", "sddnnf-p", "sddnnf-lp"}) {
    EXPECT_NE(r.err.find(e), std::string::npos) << r.err;
  }
  EXPECT_EQ(invoke({"infer", (dir / "ds").string(), "--oracle", "perfect", "-p", "0.1"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, CorruptDatasetIsRuntimeFailure) {
  const auto dir = scratch("corrupt");
  ASSERT_EQ(invoke({"generate", "task6", "-o", dir.string(), "--train", "4", "--val", "2", "--test", "2"}).code, 0);
  std::string csv = slurp(dir / "dataset.csv");
  csv.erase(csv.find("p_truth"), 7);
  std::ofstream(dir / "dataset.csv", std::ios::binary) << csv;
  EXPECT_EQ(invoke({"infer", dir.string()}).code, 1);
  fs::remove_all(dir);
}

TEST(Cli, SweepGridSeedsAndReport) {
  const auto dir = scratch("sweep");
  auto r = invoke({"sweep", "task6", "--seeds", "3", "--engines", "exact", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = ltlzinc::parse_csv(slurp(dir / "sweep.csv"));
  std::map<std::string, int> per_config;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ++per_config[rows[i][1] + "|" + rows[i][2] + "|" + rows[i][3] + "|" + rows[i][4]];
  }
  // Two targets, perfect plus flip and confidence at three noise levels.
  EXPECT_EQ(per_config.size(), 14u);
  for (const auto& [k, n] : per_config) EXPECT_EQ(n, 3) << k;
  EXPECT_TRUE(fs::exists(dir / "summary.json"));

  r = invoke({"report", (dir / "sweep.csv").string(), "-o", (dir / "again.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "again.json"), slurp(dir / "summary.json"));
  EXPECT_NE(r.out.find("task6,exact,ic+cc,perfect,0,3,1.000000,0.000000"), std::string::npos) << r.out;

  EXPECT_EQ(invoke({"sweep", "task6", "--engines", "exact,quantum"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "task6", "--seeds", "0"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, BaselinePrintsBothValues) {
  const auto r = invoke({"baseline", "task2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mp_successor: "), std::string::npos);
  EXPECT_NE(r.out.find("mp_sequence: 0.500000"), std::string::npos) << r.out;
}

TEST(Cli, CacheDirectoryStoresAutomata) {
  const auto dir = scratch("cache");
  ::setenv("LTLZINC_CACHE_DIR", dir.string().c_str(), 1);
  auto r = invoke({"compile", "task2"});
  EXPECT_NE(r.out.find("cache: stored"), std::string::npos) << r.out;
  r = invoke({"compile", "task2"});
  EXPECT_NE(r.out.find("cache: hit"), std::string::npos);
  EXPECT_NE(r.out.find("states: 5\n"), std::string::npos);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.path().string().ends_with(".dfa.json");
  EXPECT_EQ(files, 1u);
  ::unsetenv("LTLZINC_CACHE_DIR");
  fs::remove_all(dir);
}

TEST(Cli, HelpAndUsageErrors) {
  auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"compile", "generate", "infer", "sweep", "baseline", "report"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_NE(r.out.find("Exit codes"), std::string::npos);
  r = invoke({"generate", "--help"});
  for (const char* flag : {"--seed", "--positive-ratio", "--jobs", "--pools", "--epoch", "--out"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"generate", "task1"}).code, 2);
  EXPECT_EQ(invoke({"compile", "task1", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"compile", "task1", "--max-states", "3"}).code, 1);
}
