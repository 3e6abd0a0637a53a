#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sgprm/baselines.hpp"
#include "sgprm/errors.hpp"
#include "sgprm/search.hpp"
#include "test_util.hpp"

namespace sgprm {
namespace {

class ByIdModel final : public PerceptionModel {
 public:
  explicit ByIdModel(std::map<std::string, double> costs) : costs_(std::move(costs)) {}
  double object_cost(const CameraPose&, const ObjectNode& obj) const override { return costs_.at(obj.id); }
  std::string kind() const override { return "by_id"; }

 private:
  std::map<std::string, double> costs_;
};

ObjectNode object_at(const std::string& id, const Vec3& c) {
  ObjectNode o;
  o.id = id;
  o.class_name = "monitor";
  o.centroid = c;
  o.face_normal = -Vec3::UnitX();
  o.extent = Vec3(0.2, 0.2, 0.2);
  return o;
}

SceneGraph three_object_scene() {
  SceneGraph scene = testing::single_object_scene();
  scene.objects = {object_at("a", Vec3(5, 5, 1.2)), object_at("b", Vec3(5, 7, 1.2)), object_at("c", Vec3(8, 5, 1.2))};
  return scene;
}

// Camera center sits at (x, y, mount height) whatever the heading, pan and tilt.
Configuration base_at(double x, double y) { return {x, y, 0.0, 0.0, 0.0}; }

TEST(Baselines, MethodNames) {
  for (Method m : kAllMethods) EXPECT_EQ(method_from_string(to_string(m)), m);
  EXPECT_STREQ(to_string(Method::kClosestObjectLowDof), "closest_object_low_dof");
  EXPECT_THROW(method_from_string("rrt"), InvalidConfigurationError);
}

TEST(Baselines, ClosestObjectTarget) {
  const RobotModel robot = testing::default_robot();
  const SceneGraph single = testing::single_object_scene(Vec3(5, 5, 1.2));
  EXPECT_EQ(closest_object_target(base_at(1, 1), single, robot).id, "target");

  const SceneGraph scene = three_object_scene();
  EXPECT_EQ(closest_object_target(base_at(4, 5), scene, robot).id, "a");  // 1.0 vs 2.24 vs 4.0
  EXPECT_EQ(closest_object_target(base_at(5, 6), scene, robot).id, "a");  // a and b both at 1.0
  SceneGraph swapped = scene;
  swapped.objects[0].id = "z";
  EXPECT_EQ(closest_object_target(base_at(5, 6), swapped, robot).id, "b");
  EXPECT_NEAR(nearest_object_distance(base_at(4, 5), scene, robot), 1.0, 1e-12);

  swapped.objects[1].weight = 0.0;
  EXPECT_EQ(closest_object_target(base_at(5, 6), swapped, robot).id, "z");
}

TEST(Baselines, LowestCostTarget) {
  const RobotModel robot = testing::default_robot();
  const SceneGraph scene = three_object_scene();
  const ByIdModel model({{"a", 0.7}, {"b", 0.2}, {"c", 0.9}});
  EXPECT_EQ(lowest_cost_target(base_at(2, 2), scene, model, robot).id, "b");
  EXPECT_EQ(lowest_object_cost(base_at(2, 2), scene, model, robot), 0.2);
  const ByIdModel tied({{"a", 0.5}, {"b", 0.2}, {"c", 0.2}});
  EXPECT_EQ(lowest_cost_target(base_at(2, 2), scene, tied, robot).id, "b");
  const SceneGraph single = testing::single_object_scene();
  EXPECT_EQ(lowest_cost_target(base_at(2, 2), single, ByIdModel({{"target", 0.3}}), robot).id, "target");
}

TEST(Baselines, LowestCostAgreesWithExhaustiveEvaluation) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const auto model = testing::oracle_model(scene, robot);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Configuration q = sample_free(scene.workspace, scene.obstacles, robot, rng);
    const CameraPose cam = forward_kinematics(q, robot);
    const auto monitored = scene.monitored_objects();
    const ObjectNode* best = nullptr;
    double best_cost = 0.0;
    for (const auto& o : monitored) {
      const double c = model->object_cost(cam, o);
      if (!best || c < best_cost || (c == best_cost && o.id < best->id)) {
        best = &o;
        best_cost = c;
      }
    }
    const ObjectNode& got = lowest_cost_target(q, scene, *model, robot);
    EXPECT_EQ(got.id, best->id);
    EXPECT_EQ(lowest_object_cost(q, scene, *model, robot), best_cost);
  }
}

TEST(Baselines, ConstructorPreconditions) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const auto model = testing::oracle_model(scene, robot);
  EXPECT_THROW(BaselineStrategy(Method::kMopsPrm, scene, robot, model), InvalidConfigurationError);
  EXPECT_THROW(BaselineStrategy(Method::kClosestObject, scene, robot, nullptr), InvalidConfigurationError);
  SceneGraph empty = scene;
  for (auto& o : empty.objects) o.weight = 0.0;
  EXPECT_THROW(BaselineStrategy(Method::kClosestObject, empty, robot, model), DomainError);
  BaselineParams bad;
  bad.rest_tilt = 3.0;
  EXPECT_THROW(BaselineStrategy(Method::kClosestObjectLowDof, scene, robot, model, bad), InvalidConfigurationError);
  for (Method m : kAllMethods) EXPECT_EQ(make_strategy(m, scene, robot, model)->name(), to_string(m));
}

TEST(Baselines, LowDofKeepsRestPose) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  BaselineParams params;
  params.rest_pan = 0.25;
  params.rest_tilt = -0.1;
  const BaselineStrategy s(Method::kClosestObjectLowDof, scene, robot, testing::oracle_model(scene, robot), params);
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng = make_stream(3, i);
    SamplerStats stats;
    const Configuration q = s.sample_node(rng, stats);
    EXPECT_EQ(q.pan, 0.25);
    EXPECT_EQ(q.tilt, -0.1);
    EXPECT_TRUE(config_valid(q, scene, robot));
    EXPECT_EQ(stats.projections, 0u);
  }
}

TEST(Baselines, LowDofRoadmapHasNoPanTiltOnlyDuplicates) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const BaselineStrategy s(Method::kClosestObjectLowDof, scene, robot, testing::oracle_model(scene, robot));
  PlannerParams p;
  p.P = 150;
  p.threads = 1;
  const Roadmap rm = build_roadmap(s, scene, robot, p, 4);
  for (std::size_t i = 0; i < rm.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < rm.nodes.size(); ++j) {
      const auto& a = rm.nodes[i];
      const auto& b = rm.nodes[j];
      EXPECT_FALSE(a.x == b.x && a.y == b.y && a.theta == b.theta);
    }
  }
}

TEST(Baselines, ClosestObjectNodesAimAtTheirTarget) {
  const SceneGraph scene = testing::single_object_scene();
  const RobotModel robot = testing::default_robot();
  const BaselineStrategy s(Method::kClosestObject, scene, robot, testing::oracle_model(scene, robot));
  const Vec3 c = scene.objects[0].centroid;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng = make_stream(6, i), replay = make_stream(6, i);
    SamplerStats stats;
    const Configuration q = s.sample_node(rng, stats);
    EXPECT_TRUE(config_valid(q, scene, robot));
    EXPECT_LE(stats.projections, stats.free_samples);
    // On the first attempt the node is the projection of the first free draw.
    if (stats.free_samples == 1) {
      const Configuration q0 = sample_free(scene.workspace, scene.obstacles, robot, replay);
      const ProjectionResult pr = project_to_centroid(q0, c, scene, robot, ProjectionParams{});
      EXPECT_EQ(q, pr.q);
      EXPECT_LE(lateral_residual(q, c, robot).norm(), lateral_residual(q0, c, robot).norm());
    }
  }
}

TEST(Baselines, SamplingIsDeterministic) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const auto model = testing::oracle_model(scene, robot);
  for (Method m : {Method::kClosestObjectLowDof, Method::kClosestObject, Method::kLowestCostObject}) {
    const BaselineStrategy s(m, scene, robot, model);
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng a = make_stream(9, i), b = make_stream(9, i);
      SamplerStats sa, sb;
      EXPECT_EQ(s.sample_node(a, sa), s.sample_node(b, sb)) << to_string(m);
      EXPECT_EQ(sa, sb);
    }
  }
}

TEST(Baselines, DistanceChannelConstantWhenCameraStaysPut) {
  const SceneGraph scene = testing::single_object_scene(Vec3(5, 5, 1.2));
  const RobotModel robot = testing::default_robot();
  const auto model = testing::oracle_model(scene, robot);
  const LocalMotion m = straight_line({3, 5, 0.0, 0.0, 0.0}, {3, 5, 1.0, 0.5, -0.3}, robot.dof_weights);
  for (Method kind : {Method::kClosestObject, Method::kClosestObjectLowDof}) {
    const BaselineStrategy s(kind, scene, robot, model);
    EXPECT_NEAR(baseline_edge_perception(s, m, 10), 2.0, 1e-12);
  }
}

TEST(Baselines, LowestCostChannelBoundedByAggregate) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  for (const auto& o : scene.objects) ASSERT_TRUE(o.weight == 1.0 || o.weight == 0.0);
  const auto model = testing::oracle_model(scene, robot);
  const BaselineStrategy s(Method::kLowestCostObject, scene, robot, model);
  Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    const Configuration a = sample_free(scene.workspace, scene.obstacles, robot, rng);
    const Configuration b = sample_free(scene.workspace, scene.obstacles, robot, rng);
    const LocalMotion m = straight_line(a, b, robot.dof_weights);
    EXPECT_LE(baseline_edge_perception(s, m, 10), edge_perception_cost(m, scene, *model, robot, 10) + 1e-12);
    const std::vector<Configuration> qs{a, b};
    const auto pts = s.point_perception(qs);
    for (std::size_t k = 0; k < qs.size(); ++k) EXPECT_EQ(pts[k], lowest_object_cost(qs[k], scene, *model, robot));
  }
}

TEST(Baselines, DistanceChannelRefinement) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const BaselineStrategy s(Method::kClosestObject, scene, robot, testing::oracle_model(scene, robot));
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Configuration a = sample_free(scene.workspace, scene.obstacles, robot, rng);
    Configuration b = a;
    b.x = std::clamp(a.x + uniform(rng, -0.6, 0.6), 0.5, scene.workspace.max.x() - 0.5);
    b.y = std::clamp(a.y + uniform(rng, -0.6, 0.6), 0.5, scene.workspace.max.y() - 0.5);
    const LocalMotion m = straight_line(a, b, robot.dof_weights);
    // Scalar oracle: plain loop over the pointwise distance.
    auto quad = [&](int K) {
      double sum = 0.0;
      for (int k = 0; k < K; ++k) sum += nearest_object_distance(m.sample(static_cast<double>(k) / K), scene, robot);
      return sum / K;
    };
    const double coarse = baseline_edge_perception(s, m, 10);
    EXPECT_NEAR(coarse, quad(10), 1e-12);
    EXPECT_LE(std::abs(coarse - quad(1000)), 0.02 * quad(1000)) << "edge " << i;
  }
}

TEST(Baselines, ShareRoadmapAndSearchMachinery) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot = testing::default_robot();
  const auto model = testing::oracle_model(scene, robot);
  PlannerParams p;
  p.P = 60;
  p.threads = 1;
  for (Method m : {Method::kClosestObjectLowDof, Method::kClosestObject, Method::kLowestCostObject}) {
    const BaselineStrategy s(m, scene, robot, model);
    const Roadmap rm = build_roadmap(s, scene, robot, p, 5);
    EXPECT_EQ(rm.metadata.method, to_string(m));
    EXPECT_EQ(rm.nodes.size(), p.P);
    EXPECT_EQ(rm.metadata.knn_queries, p.P - 1);
    EXPECT_GT(rm.metadata.candidate_edges, 0u);
    EXPECT_EQ(rm.metadata.collision_checks, rm.metadata.candidate_edges);
    EXPECT_GE(rm.metadata.sampler.free_samples, p.P);
    if (m == Method::kClosestObjectLowDof) {
      EXPECT_EQ(rm.metadata.sampler.projections, 0u);
    } else {
      EXPECT_GE(rm.metadata.sampler.projections, p.P);
    }
    if (m == Method::kLowestCostObject) EXPECT_GT(rm.metadata.sampler.cost_evaluations, 0u);
    for (const auto& e : rm.edges) {
      const LocalMotion motion = rm.edge_motion(e, robot);
      EXPECT_EQ(e.motion_cost, motion.motion_length());
      EXPECT_EQ(e.perception_cost, baseline_edge_perception(s, motion, p.K));
    }
    const PathResult path =
        plan(rm, s, scene, robot, rm.nodes[0], GoalSpec::configuration(rm.nodes[40]), PlanParams{});
    EXPECT_GE(path.waypoints.size(), 1u);
    EXPECT_EQ(path.invalid_edges, 0u);
  }
}

}  // namespace
}  // namespace sgprm
