#include <benchmark/benchmark.h>

#include <memory>

#include "sgprm/bench.hpp"
#include "sgprm/costmap.hpp"
#include "sgprm/reeds_shepp.hpp"
#include "sgprm/sampling.hpp"
#include "sgprm/search.hpp"

namespace {

using namespace sgprm;

struct Office {
  SceneGraph scene = load_scene(std::string(SGPRM_DATA_DIR) + "/scenes/office.json");
  RobotModel robot = load_robot(std::string(SGPRM_DATA_DIR) + "/robots/pan_tilt_base.json");
  std::shared_ptr<const PerceptionModel> oracle =
      std::make_shared<OracleCostModel>(scene.obstacles, OracleParams{}, robot);
};

const Office& office() {
  static const Office o;
  return o;
}

void BM_AggregateCostOracle(benchmark::State& state) {
  const auto& o = office();
  Rng rng(1);
  const Configuration q = sample_free(o.scene.workspace, o.scene.obstacles, o.robot, rng);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_cost(q, o.scene, *o.oracle, o.robot));
}
BENCHMARK(BM_AggregateCostOracle);

void BM_CostmapInference(benchmark::State& state) {
  const auto& o = office();
  FeatureEncoder enc;
  enc.class_vocabulary = o.scene.class_vocabulary;
  enc.mean = Eigen::VectorXd::Zero(enc.dim());
  enc.scale = Eigen::VectorXd::Ones(enc.dim());
  const int width = static_cast<int>(state.range(0));
  const CostmapModel model(enc, {width, width, width}, 0);
  Rng rng(2);
  const Configuration q = sample_free(o.scene.workspace, o.scene.obstacles, o.robot, rng);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_cost(q, o.scene, model, o.robot));
}
BENCHMARK(BM_CostmapInference)->Arg(64)->Arg(128)->Arg(256);

void BM_Projection(benchmark::State& state) {
  const auto& o = office();
  const Vec3 c = o.scene.monitored_objects().front().centroid;
  Rng rng(3);
  const Configuration q0 = sample_free(o.scene.workspace, o.scene.obstacles, o.robot, rng);
  const ProjectionParams params;
  for (auto _ : state) benchmark::DoNotOptimize(project_to_centroid(q0, c, o.scene, o.robot, params));
}
BENCHMARK(BM_Projection);

void BM_PerceptionAwareSample(benchmark::State& state) {
  const auto& o = office();
  Rng rng(4);
  const SamplerParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perception_aware_sample(o.scene, o.robot, *o.oracle, params, rng));
  }
}
BENCHMARK(BM_PerceptionAwareSample);

void BM_ReedsShepp(benchmark::State& state) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const Pose2 to{u(rng), u(rng), 0.5 * u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(shortest_reeds_shepp(Pose2{0, 0, 0}, to, 0.5));
}
BENCHMARK(BM_ReedsShepp);

void BM_BuildRoadmap(benchmark::State& state) {
  const auto& o = office();
  MopsStrategy strategy(o.scene, o.robot, o.oracle);
  PlannerParams pp;
  pp.P = static_cast<std::size_t>(state.range(0));
  pp.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(build_roadmap(strategy, o.scene, o.robot, pp, 7));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildRoadmap)->Arg(50)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Query(benchmark::State& state) {
  const auto& o = office();
  MopsStrategy strategy(o.scene, o.robot, o.oracle);
  PlannerParams pp;
  pp.P = 300;
  pp.threads = 1;
  const Roadmap rm = build_roadmap(strategy, o.scene, o.robot, pp, 7);
  const Problem pr = generate_problems(o.scene, o.robot, 1, 7).front();
  const QueryGraph g(rm, strategy, o.scene, o.robot, pr.start, GoalSpec::configuration(pr.goal), 1.0);
  const auto kind = static_cast<HeuristicKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(astar(g, kind));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_Query)
    ->Arg(static_cast<int>(HeuristicKind::kHop))
    ->Arg(static_cast<int>(HeuristicKind::kZero))
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
