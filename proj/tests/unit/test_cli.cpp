#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli.hpp"
#include "sgprm/bench.hpp"
#include "sgprm/costmap.hpp"
#include "sgprm/search.hpp"
#include "test_util.hpp"

namespace sgprm {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string config_arg(const Configuration& q) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", q.x, q.y, q.theta, q.pan, q.tilt);
  return buf;
}

const std::string kScene = testing::data_path("scenes/office.json").string();
const std::string kRobot = testing::data_path("robots/pan_tilt_base.json").string();

class Cli : public ::testing::Test {
 protected:
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  std::string build(const std::string& name, unsigned threads, const std::string& method = "mops_prm") {
    const Result r = run_cli({"build-prm", "--scene", kScene, "--robot", kRobot, "--seed", "7", "--P", "80",
                              "--threads", std::to_string(threads), "--method", method, "--no-timing", "--out",
                              file(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return file(name);
  }

  testing::TempDir dir_;
};

}  // namespace

TEST_F(Cli, GenDatasetAndTrainCostmap) {
  Result r = run_cli({"gen-dataset", "--scene", kScene, "--robot", kRobot, "--seed", "2", "--count", "300",
                      "--out", file("data.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gen-dataset: wrote 300 samples"), std::string::npos);
  EXPECT_EQ(load_dataset(file("data.csv")).size(), 300u);

  r = run_cli({"train-costmap", "--scene", kScene, "--dataset", file("data.csv"), "--epochs", "2", "--hidden",
               "8,8", "--seed", "1", "--out", file("model.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("train-costmap: 300 samples"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(file("model.bin")));
  EXPECT_NO_THROW(load_costmap(file("model.bin")));

  // The trained model drives a build.
  r = run_cli({"build-prm", "--scene", kScene, "--robot", kRobot, "--model", file("model.bin"), "--P", "30",
               "--threads", "1", "--out", file("r.bin")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, BuildPlanEvaluate) {
  const std::string rm_file = build("r.bin", 1);
  const Roadmap rm = load_roadmap(rm_file);
  EXPECT_EQ(rm.nodes.size(), 80u);
  EXPECT_EQ(rm.metadata.build_time_s, 0.0);

  const auto problems =
      generate_problems(load_scene(kScene), load_robot(kRobot), 10, 1);
  bool planned = false;
  for (const auto& pr : problems) {
    const Result r = run_cli({"plan", "--scene", kScene, "--robot", kRobot, "--roadmap", rm_file, "--start",
                              config_arg(pr.start), "--goal", config_arg(pr.goal), "--alpha", "1.0", "--no-timing",
                              "--out", file("path.json")});
    if (r.code == 1) continue;  // no path on this small roadmap
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("plan: ", 0), 0u);
    const PathResult path = load_path(file("path.json"));
    EXPECT_EQ(path.waypoints.front(), pr.start);
    EXPECT_EQ(path.waypoints.back(), pr.goal);
    EXPECT_EQ(path.plan_time_s, 0.0);
    planned = true;
    break;
  }
  ASSERT_TRUE(planned);

  Result r = run_cli({"eval-path", "--scene", kScene, "--robot", kRobot, "--path", file("path.json"), "--frames",
                      "20", "--out", file("metrics.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("eval-path: D=", 0), 0u);
  const std::string metrics = read_bytes(file("metrics.json"));
  EXPECT_NE(metrics.find("\"frames\": 20"), std::string::npos);
  EXPECT_NE(metrics.find("\"track_rate\""), std::string::npos);

  // Goal region around a roadmap node.
  const Configuration g = rm.nodes[40];
  r = run_cli({"plan", "--scene", kScene, "--robot", kRobot, "--roadmap", rm_file, "--start",
               config_arg(rm.nodes[3]), "--goal-region", config_arg(g) + ",0.5", "--heuristic", "zero",
               "--out", file("region.json")});
  EXPECT_TRUE(r.code == 0 || r.code == 1) << r.err;
}

TEST_F(Cli, BuildIsIndependentOfThreadCount) {
  EXPECT_EQ(read_bytes(build("a.bin", 1)), read_bytes(build("b.bin", 4)));
  EXPECT_EQ(read_bytes(build("c.bin", 1, "closest_object")), read_bytes(build("d.bin", 3, "closest_object")));
}

TEST_F(Cli, BenchmarkIsByteIdenticalAcrossRuns) {
  auto bench = [&](const std::string& out, unsigned threads) {
    return run_cli({"benchmark", "--scene", kScene, "--robot", kRobot, "--seed", "11", "--P", "60", "--problems",
                    "3", "--frames", "10", "--methods", "closest_object_low_dof,mops_prm", "--threads",
                    std::to_string(threads), "--no-timing", "--out", file(out)});
  };
  const Result a = bench("m1.csv", 1);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("benchmark: 2 methods x 3 problems"), std::string::npos);
  const Result b = bench("m2.csv", 1);
  ASSERT_EQ(b.code, 0) << b.err;
  const Result c = bench("m3.csv", 4);
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(read_bytes(file("m1.csv")), read_bytes(file("m2.csv")));
  EXPECT_EQ(read_bytes(file("m1.json")), read_bytes(file("m2.json")));
  EXPECT_EQ(read_bytes(file("m1.csv")), read_bytes(file("m3.csv")));
  EXPECT_EQ(read_bytes(file("m1.json")), read_bytes(file("m3.json")));
}

TEST_F(Cli, Sweep) {
  const Result r = run_cli({"sweep", "--scene", kScene, "--robot", kRobot, "--nodes", "40", "--objects", "2",
                            "--fixed-nodes", "40", "--seeds", "1", "--problems", "1", "--threads", "1",
                            "--no-timing", "--out", file("sweep.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sweep: 2 rows"), std::string::npos);
  const std::string csv = read_bytes(file("sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"fly"}).code, 2);
  // --out missing.
  EXPECT_EQ(run_cli({"build-prm", "--scene", kScene}).code, 2);
  // --roadmap missing.
  EXPECT_EQ(run_cli({"plan", "--scene", kScene, "--start", "1,1,0,0,0", "--goal", "2,2,0,0,0", "--out",
                     file("p.json")})
                .code,
            2);
  const Result unknown = run_cli({"build-prm", "--scene", kScene, "--out", file("r.bin"), "--bogus", "1"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE((unknown.out + unknown.err).find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({"build-prm", "--scene", kScene, "--out", file("r.bin"), "--steering", "dubins"}).code, 2);
  EXPECT_EQ(run_cli({"build-prm", "--scene", kScene, "--out", file("r.bin"), "--P", "0"}).code, 2);
  EXPECT_FALSE(std::filesystem::exists(file("r.bin")));
}

TEST_F(Cli, HelpExitsZero) {
  const Result r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("build-prm"), std::string::npos);
}

TEST_F(Cli, DomainErrorsExitOne) {
  EXPECT_EQ(run_cli({"build-prm", "--scene", file("missing.json"), "--out", file("r.bin")}).code, 1);
  const std::string rm_file = build("r.bin", 1);
  const Result bad = run_cli({"plan", "--scene", kScene, "--roadmap", rm_file, "--start", "1,2", "--goal",
                              "2,2,0,0,0", "--out", file("p.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(run_cli({"plan", "--scene", kScene, "--roadmap", file("nothing.bin"), "--start", "1,1,0,0,0", "--goal",
                     "2,2,0,0,0", "--out", file("p.json")})
                .code,
            1);
  EXPECT_EQ(run_cli({"build-prm", "--scene", kScene, "--out", file("x.bin"), "--method", "teleport"}).code, 1);
}

}  // namespace sgprm
