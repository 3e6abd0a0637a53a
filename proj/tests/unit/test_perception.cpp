#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sgprm/errors.hpp"
#include "sgprm/perception.hpp"
#include "test_util.hpp"

namespace sgprm {
namespace {

using testing::single_object_scene;

// Scene object at (5, 5, 1) facing -x; a camera at (5 - d, 5, 1) with yaw 0
// looks straight at its face.
struct Fixture {
  SceneGraph scene = single_object_scene();
  RobotModel robot;
  OracleParams params;
  const ObjectNode& obj() const { return scene.objects[0]; }
};

double formula(double d, double beta, double gamma, const OracleParams& p) {
  const double e = (d - p.optimal_distance) / p.distance_sigma;
  return std::exp(-0.5 * e * e) * std::pow(std::cos(beta), p.axis_exponent) * std::max(0.0, std::cos(gamma));
}

TEST(Oracle, PerfectViewpointScoresOne) {
  Fixture f;
  const CameraPose cam = make_camera_pose(Vec3(3, 5, 1), 0.0, 0.0);
  const double s = oracle_score(cam, f.obj(), {}, f.params, f.robot);
  EXPECT_DOUBLE_EQ(s, 1.0);
  EXPECT_DOUBLE_EQ(label_from_score(s), 0.0);
}

TEST(Oracle, BehindFaceScoresZero) {
  Fixture f;
  const CameraPose cam = make_camera_pose(Vec3(7, 5, 1), kPi, 0.0);
  ASSERT_TRUE(in_fov(cam, f.obj().centroid, f.robot));
  const double s = oracle_score(cam, f.obj(), {}, f.params, f.robot);
  EXPECT_EQ(s, 0.0);
  EXPECT_EQ(label_from_score(s), 1.0);
}

TEST(Oracle, OneSigmaOffRange) {
  Fixture f;
  const CameraPose cam = make_camera_pose(Vec3(2, 5, 1), 0.0, 0.0);
  const double s = oracle_score(cam, f.obj(), {}, f.params, f.robot);
  EXPECT_NEAR(s, std::exp(-0.5), 1e-12);
  EXPECT_NEAR(s, 0.60653, 1e-5);
  EXPECT_NEAR(label_from_score(s), 0.15482, 1e-5);
}

TEST(Oracle, MatchesFormulaOffAxis) {
  Fixture f;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 center(5 + 3 * u(rng), 5 + 3 * u(rng), 1 + 0.8 * u(rng));
    const Vec3 to_obj = f.obj().centroid - center;
    const double yaw = std::atan2(to_obj.y(), to_obj.x()) + 0.4 * u(rng);
    const double pitch = std::atan2(to_obj.z(), to_obj.head<2>().norm()) + 0.3 * u(rng);
    const CameraPose cam = make_camera_pose(center, yaw, pitch);
    const double s = oracle_score(cam, f.obj(), {}, f.params, f.robot);
    if (!in_fov(cam, f.obj().centroid, f.robot)) {
      EXPECT_EQ(s, 0.0);
      continue;
    }
    const double d = to_obj.norm();
    const double beta = std::acos(std::clamp(to_obj.dot(cam.optical_axis) / d, -1.0, 1.0));
    const double gamma = std::acos(std::clamp(f.obj().face_normal.dot(-to_obj) / d, -1.0, 1.0));
    EXPECT_NEAR(s, formula(d, beta, gamma, f.params), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Oracle, OcclusionZeroesScore) {
  Fixture f;
  std::vector<Obstacle> wall{Box{Vec3(3.9, 4, 0), Vec3(4.1, 6, 2)}};
  const CameraPose cam = make_camera_pose(Vec3(3, 5, 1), 0.0, 0.0);
  EXPECT_EQ(oracle_score(cam, f.obj(), wall, f.params, f.robot), 0.0);
}

TEST(Oracle, ScoreInUnitInterval) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const CameraPose cam = make_camera_pose(Vec3(12 * u(rng), 8 * u(rng), 1.2), 2 * kPi * u(rng), u(rng) - 0.5);
    for (const auto& o : scene.objects) {
      const double s = oracle_score(cam, o, scene.obstacles, OracleParams{}, robot);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(Oracle, LabelMonotoneDecreasing) {
  double prev = label_from_score(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double cur = label_from_score(i / 1000.0);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Oracle, ParamValidation) {
  OracleParams p;
  p.distance_sigma = 0.0;
  EXPECT_THROW(p.validate(), InvalidConfigurationError);
}

TEST(PerceptionCost, OracleBackendExtremes) {
  Fixture f;
  const OracleCostModel model({}, f.params, f.robot);
  const Configuration good{3.0, 5.0, 0.0, 0.0, std::atan2(1.0 - 1.2, 2.0)};
  // Camera sits 0.2 m above the centroid; the range term stays within 1e-2 of 1.
  EXPECT_NEAR(perception_cost_of(good, f.obj(), model, f.robot), 0.0, 1e-4);
  const Configuration behind{3.0, 5.0, kPi, 0.0, 0.0};
  EXPECT_EQ(perception_cost_of(behind, f.obj(), model, f.robot), 1.0);
}

TEST(AggregateCost, NoMonitoredObjects) {
  Fixture f;
  f.scene.objects[0].weight = 0.0;
  const OracleCostModel model({}, f.params, f.robot);
  EXPECT_EQ(aggregate_cost(Configuration{3, 5, 0, 0, 0}, f.scene, model, f.robot), 0.0);
}

// Per-object costs read from a table keyed by object id.
class TableModel final : public PerceptionModel {
 public:
  double object_cost(const CameraPose&, const ObjectNode& obj) const override {
    return obj.id == "a" ? 0.2 : 0.3;
  }
  std::string kind() const override { return "table"; }
};

TEST(AggregateCost, SumOfPerObjectCalls) {
  SceneGraph scene = single_object_scene();
  scene.objects[0].id = "a";
  ObjectNode b = scene.objects[0];
  b.id = "b";
  scene.objects.push_back(b);
  const TableModel model;
  const RobotModel robot;
  const Configuration q{1, 1, 0, 0, 0};
  const double expected =
      perception_cost_of(q, scene.objects[0], model, robot) + perception_cost_of(q, scene.objects[1], model, robot);
  EXPECT_DOUBLE_EQ(expected, 0.5);
  EXPECT_DOUBLE_EQ(aggregate_cost(q, scene, model, robot), expected);
}

TEST(AggregateCost, LinearInWeights) {
  SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  const auto model = testing::oracle_model(scene, robot);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Configuration q{12 * u(rng), 8 * u(rng), 2 * kPi * u(rng) - kPi, 2 * u(rng) - 1, -0.5 * u(rng)};
    const double base = aggregate_cost(q, scene, *model, robot);
    SceneGraph doubled = scene;
    for (auto& o : doubled.objects) o.weight *= 2.0;
    EXPECT_DOUBLE_EQ(aggregate_cost(q, doubled, *model, robot), 2.0 * base);
    SceneGraph mixed = scene;
    std::vector<double> w{0.5, 0.0, 1.5, 2.0};
    double expected = 0.0;
    for (std::size_t k = 0; k < mixed.objects.size(); ++k) {
      mixed.objects[k].weight = w[k];
      expected += w[k] * perception_cost_of(q, mixed.objects[k], *model, robot);
    }
    EXPECT_NEAR(aggregate_cost(q, mixed, *model, robot), expected, 1e-12);
  }
}

TEST(BatchCost, MatchesScalarCalls) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  const auto model = testing::oracle_model(scene, robot);
  EXPECT_TRUE(batch_cost({}, scene, *model, robot).empty());
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Configuration> qs;
  for (int i = 0; i < 64; ++i) qs.push_back({12 * u(rng), 8 * u(rng), 2 * kPi * u(rng) - kPi, 2 * u(rng) - 1, -0.5 * u(rng)});
  const auto single = batch_cost(std::span(qs.data(), 1), scene, *model, robot);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_NEAR(single[0], aggregate_cost(qs[0], scene, *model, robot), 1e-9);
  const auto batch = batch_cost(qs, scene, *model, robot);
  ASSERT_EQ(batch.size(), qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) EXPECT_NEAR(batch[i], aggregate_cost(qs[i], scene, *model, robot), 1e-9);
}

TEST(Dataset, SingleSampleInView) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  const auto samples = generate_dataset(scene, robot, OracleParams{}, 1, 3);
  ASSERT_EQ(samples.size(), 1u);
  const ObjectNode* obj = scene.find_object(samples[0].object_id);
  ASSERT_NE(obj, nullptr);
  EXPECT_TRUE(in_fov(samples[0].camera, obj->centroid, robot));
  EXPECT_FALSE(occluded(samples[0].camera, obj->centroid, scene.obstacles));
}

TEST(Dataset, DeterministicInSeed) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  const auto a = generate_dataset(scene, robot, OracleParams{}, 200, 9);
  const auto b = generate_dataset(scene, robot, OracleParams{}, 200, 9);
  const auto c = generate_dataset(scene, robot, OracleParams{}, 200, 10);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].camera.center, b[i].camera.center);
    EXPECT_EQ(a[i].camera.optical_axis, b[i].camera.optical_axis);
    EXPECT_EQ(a[i].object_id, b[i].object_id);
    EXPECT_EQ(a[i].score, b[i].score);
    differs |= a[i].camera.center != c[i].camera.center;
  }
  EXPECT_TRUE(differs);
}

TEST(Dataset, ScoreDistributionAndLabels) {
  const SceneGraph scene = testing::office_scene();
  const RobotModel robot;
  const auto samples = generate_dataset(scene, robot, OracleParams{}, 10000, 1);
  ASSERT_EQ(samples.size(), 10000u);
  std::size_t zero = 0, high = 0;
  for (const auto& s : samples) {
    const ObjectNode* obj = scene.find_object(s.object_id);
    ASSERT_NE(obj, nullptr);
    EXPECT_TRUE(in_fov(s.camera, obj->centroid, robot));
    EXPECT_NEAR(s.label, (1 - s.score) * (1 - s.score), 1e-12);
    EXPECT_DOUBLE_EQ(s.score, oracle_score(s.camera, *obj, scene.obstacles, OracleParams{}, robot));
    zero += s.score == 0.0;
    high += s.score > 0.9;
  }
  EXPECT_GT(zero, 0u);
  EXPECT_GT(high, 0u);
}

TEST(Dataset, RequiresMonitoredObject) {
  SceneGraph scene = testing::office_scene();
  for (auto& o : scene.objects) o.weight = 0.0;
  EXPECT_THROW(generate_dataset(scene, RobotModel{}, OracleParams{}, 10, 0), DomainError);
}

TEST(Dataset, FileRoundTrip) {
  const SceneGraph scene = testing::office_scene();
  const auto samples = generate_dataset(scene, RobotModel{}, OracleParams{}, 50, 4);
  testing::TempDir dir;
  save_dataset(samples, dir / "d.csv");
  const auto loaded = load_dataset(dir / "d.csv");
  ASSERT_EQ(loaded.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(loaded[i].object_id, samples[i].object_id);
    EXPECT_EQ(loaded[i].score, samples[i].score);
    EXPECT_EQ(loaded[i].label, samples[i].label);
    EXPECT_NEAR((loaded[i].camera.center - samples[i].camera.center).norm(), 0.0, 1e-12);
    EXPECT_NEAR((loaded[i].camera.optical_axis - samples[i].camera.optical_axis).norm(), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace sgprm
