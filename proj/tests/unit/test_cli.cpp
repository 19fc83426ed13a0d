#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "../../tools/src/cli.hpp"
#include "../../tools/src/manifest.hpp"
#include "crad/graph.hpp"
#include "crad/theta_io.hpp"

namespace fs = std::filesystem;
using crad::cli::run;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("crad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string path(const std::string& name) const { return (root_ / name).string(); }

  std::string generate(const std::string& name, const std::string& rho_a = "0.2",
                       const std::string& seed = "1") {
    EXPECT_EQ(run({"generate", "--n", "60", "--k", "2", "--avg-degree", "12", "--rho-a", rho_a,
                   "--seed", seed, "--out", path(name)}),
              0);
    return path(name);
  }

  fs::path root_;
};

std::vector<std::string> fit_flags() {
  return {"--k", "2", "--restarts", "2", "--max-iter", "60"};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_F(CliTest, GenerateWritesOutputsAndRealizedStats) {
  ASSERT_EQ(run({"generate", "--n", "500", "--k", "3", "--avg-degree", "60", "--eta", "20.09",
                 "--rho-a", "0.3", "--seed", "1", "--out", path("g")}),
            0);
  for (const char* f : {"graph.txt", "labels.txt", "theta.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(root_ / "g" / f)) << f;
  const auto m = read_json(root_ / "g" / "manifest.json");
  EXPECT_EQ(m["subcommand"], "generate");
  EXPECT_NEAR(m["realized"]["edges"].get<double>() / 15000.0, 1.0, 0.1);
  EXPECT_NEAR(m["realized"]["anomaly_density"].get<double>(), 0.3, 0.05);
}

TEST_F(CliTest, GenerateWithoutAnomaliesGivesEmptyLabels) {
  const auto dir = generate("g", "0");
  std::ifstream in(fs::path(dir) / "labels.txt");
  std::string line;
  std::size_t pairs = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++pairs;
  EXPECT_EQ(pairs, 0u);
}

TEST_F(CliTest, ManifestDigestsMatchFiles) {
  const auto dir = generate("g");
  const auto m = read_json(fs::path(dir) / "manifest.json");
  ASSERT_EQ(m["outputs"].size(), 3u);
  for (const auto& o : m["outputs"]) {
    EXPECT_EQ(o["sha256"], crad::cli::sha256_file(fs::path(dir) / o["path"].get<std::string>()));
  }
}

TEST_F(CliTest, InferOnTwoNodeGraph) {
  {
    std::ofstream f(path("tiny.txt"));
    f << "a b\n";
  }
  EXPECT_EQ(run({"infer", "--input", path("tiny.txt"), "--k", "1", "--out", path("o")}), 0);
  const auto doc = crad::load_theta(root_ / "o" / "theta.json");
  EXPECT_EQ(doc.theta.n_nodes(), 2u);
  EXPECT_TRUE(fs::exists(root_ / "o" / "q.txt"));
  EXPECT_TRUE(fs::exists(root_ / "o" / "run.json"));
}

TEST_F(CliTest, InferIsDeterministic) {
  const auto dir = generate("g");
  const auto args = cat({"infer", "--input", dir + "/graph.txt", "--seed", "4"}, fit_flags());
  ASSERT_EQ(run(cat(args, {"--out", path("a")})), 0);
  ASSERT_EQ(run(cat(args, {"--out", path("b"), "--threads", "2"})), 0);
  for (const char* f : {"theta.json", "q.txt", "run.json"})
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
  const auto mu = crad::load_theta(root_ / "a" / "theta.json").theta.mu;
  EXPECT_GT(mu, 0.0);
  EXPECT_LT(mu, 1.0);
}

TEST_F(CliTest, InjectEvaluatePipeline) {
  const auto dir = generate("g", "0");
  ASSERT_EQ(run({"inject", "--input", dir + "/graph.txt", "--density", "0.1", "--seed", "7",
                 "--out", path("inj")}),
            0);
  ASSERT_EQ(run(cat({"infer", "--input", path("inj") + "/graph.txt", "--out", path("fit")},
                    fit_flags())),
            0);
  ASSERT_EQ(run({"evaluate", "--metric", "precision", "--graph", path("inj") + "/graph.txt",
                 "--q", path("fit") + "/q.txt", "--labels", path("inj") + "/labels.txt",
                 "--out", path("ev")}),
            0);
  std::ifstream in(root_ / "ev" / "report.jsonl");
  std::string line;
  std::getline(in, line);
  const auto r = nlohmann::json::parse(line);
  EXPECT_EQ(r["metric"], "precision_at_budget");
  EXPECT_GE(r["value"].get<double>(), 0.0);
  EXPECT_LE(r["value"].get<double>(), 1.0);

  ASSERT_EQ(run({"evaluate", "--metric", "auc", "--graph", path("inj") + "/graph.txt", "--q",
                 path("fit") + "/q.txt", "--labels", path("inj") + "/labels.txt", "--out",
                 path("ev2")}),
            0);
}

TEST_F(CliTest, EvaluateCosineAgainstGroundTruth) {
  const auto dir = generate("g");
  ASSERT_EQ(run(cat({"infer", "--input", dir + "/graph.txt", "--out", path("fit")}, fit_flags())),
            0);
  ASSERT_EQ(run({"evaluate", "--metric", "cs", "--truth", dir + "/theta.json", "--theta",
                 path("fit") + "/theta.json", "--out", path("ev")}),
            0);
  const auto m = read_json(root_ / "ev" / "manifest.json");
  const double cs = m["report"]["value"].get<double>();
  EXPECT_GE(cs, 0.0);
  EXPECT_LE(cs, 1.0);
}

TEST_F(CliTest, EvaluateWithoutLabelsFails) {
  const auto dir = generate("g");
  ASSERT_EQ(run(cat({"infer", "--input", dir + "/graph.txt", "--out", path("fit")}, fit_flags())),
            0);
  EXPECT_NE(run({"evaluate", "--metric", "precision", "--graph", dir + "/graph.txt", "--q",
                 path("fit") + "/q.txt", "--out", path("ev")}),
            0);
  EXPECT_FALSE(fs::exists(root_ / "ev"));
}

TEST_F(CliTest, CvIsDeterministic) {
  const auto dir = generate("g");
  const auto args =
      cat({"cv", "--input", dir + "/graph.txt", "--folds", "5", "--seed", "3"}, fit_flags());
  ASSERT_EQ(run(cat(args, {"--out", path("a")})), 0);
  ASSERT_EQ(run(cat(args, {"--out", path("b")})), 0);
  for (const char* f : {"folds.txt", "report.jsonl", "report.csv", "manifest.json"})
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
}

TEST_F(CliTest, FailedRunRemovesPartialOutputs) {
  const auto dir = generate("g");
  // The node cap is checked inside fit, after the output directory exists.
  EXPECT_NE(run({"infer", "--input", dir + "/graph.txt", "--max-nodes", "10", "--out",
                 path("o")}),
            0);
  EXPECT_FALSE(fs::exists(root_ / "o"));

  fs::create_directories(root_ / "keep");
  EXPECT_NE(run({"infer", "--input", dir + "/graph.txt", "--max-nodes", "10", "--out",
                 path("keep")}),
            0);
  EXPECT_TRUE(fs::exists(root_ / "keep"));
  EXPECT_TRUE(fs::is_empty(root_ / "keep"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(run(std::vector<std::string>{}), 0);
  EXPECT_NE(run({"generate"}), 0);
  EXPECT_NE(run({"infer", "--input", path("missing.txt"), "--out", path("o")}), 0);
  EXPECT_NE(run({"generate", "--n", "10", "--rho-a", "2", "--out", path("bad")}), 0);
  EXPECT_FALSE(fs::exists(root_ / "bad"));
}
