#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sgprm/geometry.hpp"

namespace sgprm {

/// An object of interest. Objects with weight 0 are kept in the graph but are
/// not monitored.
struct ObjectNode {
  std::string id;
  std::string class_name;
  Vec3 centroid = Vec3::Zero();
  Vec3 face_normal = Vec3::UnitX();  // preferred viewing direction, away from the face
  Vec3 extent = Vec3::Ones();
  double weight = 1.0;

  bool monitored() const { return weight > 0.0; }
};

struct SceneGraph {
  Box workspace;
  std::vector<Obstacle> obstacles;
  std::vector<ObjectNode> objects;
  std::vector<std::string> class_vocabulary;

  /// Objects with positive weight, in file order.
  std::vector<ObjectNode> monitored_objects() const;

  /// Index of `class_name` in the vocabulary, or -1.
  int class_index(const std::string& class_name) const;

  const ObjectNode* find_object(const std::string& id) const;

  /// Throws InvalidConfigurationError naming the offending field.
  void validate() const;
};

/// Aim points for stage-1 projection: one per object, one per unordered
/// pair, one for all objects together.
struct CentroidSet {
  struct Entry {
    std::string label;
    Vec3 point;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
};

inline constexpr double kCentroidMergeTolerance = 1e-6;

/// Full N + C(N,2) + 1 centroid list without merging. Throws DomainError on
/// empty input.
CentroidSet extract_centroids_raw(const std::vector<ObjectNode>& objects);

/// Same list with entries closer than kCentroidMergeTolerance merged (first wins).
CentroidSet extract_centroids(const std::vector<ObjectNode>& objects);

// --- file I/O ------------------------------------------------------------------
// Scene files are JSON with keys format (= 1), workspace, obstacles, objects,
// classes. Robot files are JSON with format (= 1) and the RobotModel fields.

SceneGraph load_scene(const std::filesystem::path& path);
SceneGraph parse_scene(const std::string& json_text);
void save_scene(const SceneGraph& scene, const std::filesystem::path& path);
std::string serialize_scene(const SceneGraph& scene);

RobotModel load_robot(const std::filesystem::path& path);
RobotModel parse_robot(const std::string& json_text);
void save_robot(const RobotModel& robot, const std::filesystem::path& path);
std::string serialize_robot(const RobotModel& robot);

bool operator==(const ObjectNode& a, const ObjectNode& b);
bool operator==(const SceneGraph& a, const SceneGraph& b);

}  // namespace sgprm
