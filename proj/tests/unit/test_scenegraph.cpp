#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sgprm/errors.hpp"
#include "sgprm/scenegraph.hpp"
#include "test_util.hpp"

namespace sgprm {
namespace {

using testing::TempDir;

const char* kMinimalScene = R"({
  "format": 1,
  "workspace": {"min": [0, 0, 0], "max": [4, 4, 3]},
  "classes": [],
  "obstacles": [],
  "objects": []
})";

ObjectNode make_object(const std::string& id, const Vec3& c) {
  ObjectNode o;
  o.id = id;
  o.class_name = "monitor";
  o.centroid = c;
  o.face_normal = Vec3::UnitX();
  o.extent = Vec3(0.2, 0.2, 0.2);
  return o;
}

bool contains_point(const CentroidSet& set, const Vec3& p, double tol = 1e-12) {
  return std::any_of(set.entries.begin(), set.entries.end(),
                     [&](const CentroidSet::Entry& e) { return (e.point - p).norm() <= tol; });
}

TEST(SceneGraph, MinimalSceneIsEmpty) {
  const SceneGraph scene = parse_scene(kMinimalScene);
  EXPECT_TRUE(scene.objects.empty());
  EXPECT_TRUE(scene.obstacles.empty());
  EXPECT_TRUE(scene.monitored_objects().empty());
}

TEST(SceneGraph, DuplicateIdNamesTheId) {
  std::string text = R"({
    "format": 1,
    "workspace": {"min": [0, 0, 0], "max": [4, 4, 3]},
    "classes": ["monitor"],
    "obstacles": [],
    "objects": [
      {"id": "dup", "class": "monitor", "centroid": [1, 1, 1], "face_normal": [1, 0, 0], "extent": [0.1, 0.1, 0.1], "weight": 1},
      {"id": "dup", "class": "monitor", "centroid": [2, 2, 1], "face_normal": [1, 0, 0], "extent": [0.1, 0.1, 0.1], "weight": 1}
    ]
  })";
  try {
    parse_scene(text);
    FAIL() << "expected an error";
  } catch (const InvalidConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("dup"), std::string::npos);
  }
}

TEST(SceneGraph, UnknownClassRejected) {
  SceneGraph scene = testing::single_object_scene();
  scene.objects[0].class_name = "robot";
  EXPECT_THROW(scene.validate(), InvalidConfigurationError);
}

TEST(SceneGraph, CentroidOutsideWorkspaceRejected) {
  SceneGraph scene = testing::single_object_scene(Vec3(11, 5, 1));
  EXPECT_THROW(scene.validate(), InvalidConfigurationError);
}

TEST(SceneGraph, BadFormatVersionRejected) {
  std::string text = kMinimalScene;
  text.replace(text.find("\"format\": 1"), 11, "\"format\": 2");
  EXPECT_THROW(parse_scene(text), ParseError);
}

TEST(SceneGraph, MalformedJsonRejected) { EXPECT_THROW(parse_scene("{ not json"), ParseError); }

TEST(SceneGraph, NonUnitNormalIsNormalized) {
  std::string text = R"({
    "format": 1,
    "workspace": {"min": [0, 0, 0], "max": [4, 4, 3]},
    "classes": ["monitor"],
    "obstacles": [],
    "objects": [
      {"id": "a", "class": "monitor", "centroid": [1, 1, 1], "face_normal": [0, 2, 0], "extent": [0.1, 0.1, 0.1], "weight": 1}
    ]
  })";
  const SceneGraph scene = parse_scene(text);
  EXPECT_NEAR(scene.objects[0].face_normal.norm(), 1.0, 1e-12);
  EXPECT_NEAR(scene.objects[0].face_normal.y(), 1.0, 1e-12);
}

TEST(SceneGraph, RoundTrip) {
  const SceneGraph scene = testing::office_scene();
  TempDir dir;
  save_scene(scene, dir / "scene.json");
  const SceneGraph loaded = load_scene(dir / "scene.json");
  EXPECT_TRUE(loaded == scene);
  EXPECT_EQ(serialize_scene(loaded), serialize_scene(scene));
}

TEST(SceneGraph, RobotRoundTrip) {
  RobotModel robot = testing::default_robot();
  robot.base_radius = 0.31;
  robot.dof_weights = {1.0, 1.0, 0.4, 0.3, 0.2};
  TempDir dir;
  save_robot(robot, dir / "robot.json");
  const RobotModel loaded = load_robot(dir / "robot.json");
  EXPECT_EQ(loaded.base_radius, robot.base_radius);
  EXPECT_EQ(loaded.camera_mount, robot.camera_mount);
  EXPECT_EQ(loaded.dof_weights, robot.dof_weights);
  EXPECT_EQ(loaded.tilt_limits.lo, robot.tilt_limits.lo);
  EXPECT_EQ(serialize_robot(loaded), serialize_robot(robot));
}

TEST(SceneGraph, MonitoredObjectsSkipZeroWeight) {
  const SceneGraph scene = load_scene(testing::data_path("scenes/paintings.json"));
  const auto monitored = scene.monitored_objects();
  ASSERT_EQ(monitored.size(), 2u);
  EXPECT_EQ(monitored[0].id, "painting1");
  EXPECT_EQ(monitored[1].id, "painting2");
  EXPECT_NE(scene.find_object("human1"), nullptr);
  EXPECT_EQ(scene.find_object("nobody"), nullptr);
}

TEST(SceneGraph, StockScenesLoad) {
  for (const char* name : {"scenes/office.json", "scenes/paintings.json", "scenes/office_large.json"}) {
    EXPECT_NO_THROW(load_scene(testing::data_path(name))) << name;
  }
  EXPECT_EQ(testing::office_scene().monitored_objects().size(), 4u);
  EXPECT_EQ(load_scene(testing::data_path("scenes/office_large.json")).monitored_objects().size(), 8u);
}

TEST(Centroids, ThreeObjectsByHand) {
  const std::vector<ObjectNode> objs{make_object("a", Vec3(0, 0, 0)), make_object("b", Vec3(2, 0, 0)),
                                     make_object("c", Vec3(0, 2, 0))};
  const CentroidSet raw = extract_centroids_raw(objs);
  ASSERT_EQ(raw.size(), 7u);
  for (const Vec3& p : {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 2, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0),
                        Vec3(2.0 / 3.0, 2.0 / 3.0, 0)}) {
    EXPECT_TRUE(contains_point(raw, p, 1e-12)) << p.transpose();
  }
  EXPECT_EQ(extract_centroids(objs).size(), 7u);
}

TEST(Centroids, SingleObjectMerges) {
  const std::vector<ObjectNode> objs{make_object("a", Vec3(1, 2, 3))};
  EXPECT_EQ(extract_centroids_raw(objs).size(), 2u);
  EXPECT_EQ(extract_centroids(objs).size(), 1u);
}

TEST(Centroids, TwoObjectsMergePairWithCollective) {
  const std::vector<ObjectNode> objs{make_object("a", Vec3(0, 0, 0)), make_object("b", Vec3(2, 2, 2))};
  EXPECT_EQ(extract_centroids_raw(objs).size(), 4u);
  EXPECT_EQ(extract_centroids(objs).size(), 3u);
}

TEST(Centroids, EmptyInputThrows) { EXPECT_THROW(extract_centroids({}), DomainError); }

TEST(Centroids, RawCountFormula) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<ObjectNode> objs;
    for (std::size_t i = 0; i < n; ++i) objs.push_back(make_object("o" + std::to_string(i), Vec3(u(rng), u(rng), u(rng))));
    EXPECT_EQ(extract_centroids_raw(objs).size(), n + n * (n - 1) / 2 + 1);
    const CentroidSet merged = extract_centroids(objs);
    for (std::size_t i = 0; i < merged.size(); ++i) {
      for (std::size_t j = i + 1; j < merged.size(); ++j) {
        EXPECT_GE((merged.entries[i].point - merged.entries[j].point).norm(), kCentroidMergeTolerance);
      }
    }
  }
}

TEST(Centroids, PermutationInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<ObjectNode> objs;
  for (int i = 0; i < 5; ++i) objs.push_back(make_object("o" + std::to_string(i), Vec3(u(rng), u(rng), u(rng))));
  const CentroidSet base = extract_centroids(objs);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(objs.begin(), objs.end(), rng);
    const CentroidSet permuted = extract_centroids(objs);
    ASSERT_EQ(permuted.size(), base.size());
    for (const auto& e : permuted.entries) EXPECT_TRUE(contains_point(base, e.point, 1e-12));
  }
}

TEST(Centroids, EntriesAreSubsetMeans) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<ObjectNode> objs;
  for (int i = 0; i < 6; ++i) objs.push_back(make_object("o" + std::to_string(i), Vec3(u(rng), u(rng), u(rng))));
  std::vector<Vec3> means;
  Vec3 all = Vec3::Zero();
  for (std::size_t i = 0; i < objs.size(); ++i) {
    means.push_back(objs[i].centroid);
    all += objs[i].centroid;
    for (std::size_t j = i + 1; j < objs.size(); ++j) means.push_back(0.5 * (objs[i].centroid + objs[j].centroid));
  }
  means.push_back(all / static_cast<double>(objs.size()));
  Vec3 lo = objs[0].centroid, hi = objs[0].centroid;
  for (const auto& o : objs) {
    lo = lo.cwiseMin(o.centroid);
    hi = hi.cwiseMax(o.centroid);
  }
  for (const auto& e : extract_centroids(objs).entries) {
    EXPECT_TRUE(std::any_of(means.begin(), means.end(), [&](const Vec3& m) { return (m - e.point).norm() < 1e-12; }));
    EXPECT_TRUE((e.point.array() >= lo.array() - 1e-12).all());
    EXPECT_TRUE((e.point.array() <= hi.array() + 1e-12).all());
  }
}

}  // namespace
}  // namespace sgprm
