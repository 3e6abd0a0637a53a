#include "sgprm/scenegraph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "json_util.hpp"
#include "sgprm/errors.hpp"

namespace sgprm {

using detail::json;

std::vector<ObjectNode> SceneGraph::monitored_objects() const {
  std::vector<ObjectNode> out;
  std::copy_if(objects.begin(), objects.end(), std::back_inserter(out),
               [](const ObjectNode& o) { return o.monitored(); });
  return out;
}

int SceneGraph::class_index(const std::string& class_name) const {
  const auto it = std::find(class_vocabulary.begin(), class_vocabulary.end(), class_name);
  return it == class_vocabulary.end() ? -1 : static_cast<int>(it - class_vocabulary.begin());
}

const ObjectNode* SceneGraph::find_object(const std::string& id) const {
  const auto it = std::find_if(objects.begin(), objects.end(), [&](const ObjectNode& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

void SceneGraph::validate() const {
  if (!(workspace.min.array() < workspace.max.array()).all()) {
    throw InvalidConfigurationError("scene: workspace min corner must be below max corner");
  }
  for (const auto& o : obstacles) validate_obstacle(o);

  std::set<std::string> vocab(class_vocabulary.begin(), class_vocabulary.end());
  if (vocab.size() != class_vocabulary.size()) {
    throw InvalidConfigurationError("scene: duplicate entry in classes");
  }

  std::set<std::string> ids;
  for (const auto& o : objects) {
    if (!ids.insert(o.id).second) throw InvalidConfigurationError("scene: duplicate object id '" + o.id + "'");
    if (!vocab.count(o.class_name)) {
      throw InvalidConfigurationError("scene: object '" + o.id + "' has class '" + o.class_name +
                                      "' which is not in classes");
    }
    if (std::abs(o.face_normal.norm() - 1.0) > 1e-9) {
      throw InvalidConfigurationError("scene: object '" + o.id + "' face_normal is not unit length");
    }
    if (!(o.weight >= 0.0)) throw InvalidConfigurationError("scene: object '" + o.id + "' has negative weight");
    if (!(o.extent.array() > 0.0).all()) {
      throw InvalidConfigurationError("scene: object '" + o.id + "' extent must be positive");
    }
    if (!workspace.contains(o.centroid)) {
      throw InvalidConfigurationError("scene: object '" + o.id + "' centroid lies outside the workspace");
    }
  }
}

CentroidSet extract_centroids_raw(const std::vector<ObjectNode>& objects) {
  if (objects.empty()) throw DomainError("extract_centroids: no objects");
  CentroidSet set;
  const std::size_t n = objects.size();
  set.entries.reserve(n + n * (n - 1) / 2 + 1);
  for (const auto& o : objects) set.entries.push_back({o.id, o.centroid});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      set.entries.push_back({objects[i].id + "+" + objects[j].id,
                             0.5 * (objects[i].centroid + objects[j].centroid)});
    }
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& o : objects) mean += o.centroid;
  set.entries.push_back({"*", mean / static_cast<double>(n)});
  return set;
}

CentroidSet extract_centroids(const std::vector<ObjectNode>& objects) {
  CentroidSet raw = extract_centroids_raw(objects);
  CentroidSet out;
  for (auto& e : raw.entries) {
    const bool dup = std::any_of(out.entries.begin(), out.entries.end(), [&](const CentroidSet::Entry& k) {
      return (k.point - e.point).norm() < kCentroidMergeTolerance;
    });
    if (!dup) out.entries.push_back(std::move(e));
  }
  return out;
}

// --- JSON ----------------------------------------------------------------------

namespace {

Vec3 read_unit(const json& j, const char* key, const std::string& where) {
  Vec3 v = detail::get_vec<3>(j, key, where);
  const double n = v.norm();
  if (!(n > 0.0)) throw ParseError(where + ": field '" + key + "' must be nonzero");
  if (std::abs(n - 1.0) > 1e-6) {
    std::clog << "warning: " << where << ": '" << key << "' not unit length (norm " << n
              << "), normalizing\n";
  }
  return v / n;
}

Obstacle read_obstacle(const json& j, std::size_t index) {
  const std::string where = "obstacles[" + std::to_string(index) + "]";
  const std::string type = detail::get_string(j, "type", where);
  if (type == "box") {
    return Box{detail::get_vec<3>(j, "min", where), detail::get_vec<3>(j, "max", where)};
  }
  if (type == "cylinder") {
    Cylinder c;
    c.center = detail::get_vec<2>(j, "center", where);
    c.radius = detail::get_number(j, "radius", where);
    c.height = detail::get_number(j, "height", where);
    c.z_min = j.contains("z_min") ? detail::get_number(j, "z_min", where) : 0.0;
    return c;
  }
  throw ParseError(where + ": unknown obstacle type '" + type + "'");
}

json write_obstacle(const Obstacle& o) {
  if (const auto* b = std::get_if<Box>(&o)) {
    return {{"type", "box"}, {"min", detail::to_array(b->min)}, {"max", detail::to_array(b->max)}};
  }
  const auto& c = std::get<Cylinder>(o);
  return {{"type", "cylinder"},
          {"center", detail::to_array(c.center)},
          {"radius", c.radius},
          {"height", c.height},
          {"z_min", c.z_min}};
}

bool obstacle_equal(const Obstacle& a, const Obstacle& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ba = std::get_if<Box>(&a)) {
    const auto& bb = std::get<Box>(b);
    return ba->min == bb.min && ba->max == bb.max;
  }
  const auto& ca = std::get<Cylinder>(a);
  const auto& cb = std::get<Cylinder>(b);
  return ca.center == cb.center && ca.radius == cb.radius && ca.height == cb.height && ca.z_min == cb.z_min;
}

}  // namespace

SceneGraph parse_scene(const std::string& json_text) {
  const json j = detail::parse_json_text(json_text, "scene");
  detail::check_format(j, 1, "scene");

  SceneGraph scene;
  const json& ws = detail::require(j, "workspace", "scene");
  scene.workspace.min = detail::get_vec<3>(ws, "min", "workspace");
  scene.workspace.max = detail::get_vec<3>(ws, "max", "workspace");

  const json& classes = detail::require(j, "classes", "scene");
  if (!classes.is_array()) throw ParseError("scene: 'classes' must be an array");
  for (const auto& c : classes) {
    if (!c.is_string()) throw ParseError("scene: 'classes' entries must be strings");
    scene.class_vocabulary.push_back(c.get<std::string>());
  }

  const json& obstacles = detail::require(j, "obstacles", "scene");
  if (!obstacles.is_array()) throw ParseError("scene: 'obstacles' must be an array");
  for (std::size_t i = 0; i < obstacles.size(); ++i) scene.obstacles.push_back(read_obstacle(obstacles[i], i));

  const json& objects = detail::require(j, "objects", "scene");
  if (!objects.is_array()) throw ParseError("scene: 'objects' must be an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    ObjectNode node;
    node.id = detail::get_string(o, "id", where);
    node.class_name = detail::get_string(o, "class", where);
    node.centroid = detail::get_vec<3>(o, "centroid", where);
    node.face_normal = read_unit(o, "face_normal", where);
    node.extent = detail::get_vec<3>(o, "extent", where);
    node.weight = detail::get_number(o, "weight", where);
    scene.objects.push_back(std::move(node));
  }

  scene.validate();
  return scene;
}

SceneGraph load_scene(const std::filesystem::path& path) { return parse_scene(detail::read_file(path)); }

std::string serialize_scene(const SceneGraph& scene) {
  json j;
  j["format"] = 1;
  j["workspace"] = {{"min", detail::to_array(scene.workspace.min)}, {"max", detail::to_array(scene.workspace.max)}};
  j["classes"] = scene.class_vocabulary;
  j["obstacles"] = json::array();
  for (const auto& o : scene.obstacles) j["obstacles"].push_back(write_obstacle(o));
  j["objects"] = json::array();
  for (const auto& o : scene.objects) {
    j["objects"].push_back({{"id", o.id},
                            {"class", o.class_name},
                            {"centroid", detail::to_array(o.centroid)},
                            {"face_normal", detail::to_array(o.face_normal)},
                            {"extent", detail::to_array(o.extent)},
                            {"weight", o.weight}});
  }
  return j.dump(2) + "\n";
}

void save_scene(const SceneGraph& scene, const std::filesystem::path& path) {
  detail::write_file(path, serialize_scene(scene));
}

RobotModel parse_robot(const std::string& json_text) {
  const json j = detail::parse_json_text(json_text, "robot");
  detail::check_format(j, 1, "robot");
  RobotModel r;
  r.base_radius = detail::get_number(j, "base_radius", "robot");
  r.camera_mount = detail::get_vec<3>(j, "camera_mount", "robot");
  const Vec2 pan = detail::get_vec<2>(j, "pan_limits", "robot");
  const Vec2 tilt = detail::get_vec<2>(j, "tilt_limits", "robot");
  r.pan_limits = {pan[0], pan[1]};
  r.tilt_limits = {tilt[0], tilt[1]};
  r.fov_half_angle_h = detail::get_number(j, "fov_half_angle_h", "robot");
  r.fov_half_angle_v = detail::get_number(j, "fov_half_angle_v", "robot");
  r.max_range = detail::get_number(j, "max_range", "robot");
  if (j.contains("dof_weights")) {
    const auto w = detail::get_vec<kDof>(j, "dof_weights", "robot");
    for (int i = 0; i < kDof; ++i) r.dof_weights[i] = w[i];
  }
  r.validate();
  return r;
}

RobotModel load_robot(const std::filesystem::path& path) { return parse_robot(detail::read_file(path)); }

std::string serialize_robot(const RobotModel& r) {
  json j;
  j["format"] = 1;
  j["base_radius"] = r.base_radius;
  j["camera_mount"] = detail::to_array(r.camera_mount);
  j["pan_limits"] = {r.pan_limits.lo, r.pan_limits.hi};
  j["tilt_limits"] = {r.tilt_limits.lo, r.tilt_limits.hi};
  j["fov_half_angle_h"] = r.fov_half_angle_h;
  j["fov_half_angle_v"] = r.fov_half_angle_v;
  j["max_range"] = r.max_range;
  j["dof_weights"] = r.dof_weights;
  return j.dump(2) + "\n";
}

void save_robot(const RobotModel& robot, const std::filesystem::path& path) {
  detail::write_file(path, serialize_robot(robot));
}

bool operator==(const ObjectNode& a, const ObjectNode& b) {
  return a.id == b.id && a.class_name == b.class_name && a.centroid == b.centroid &&
         a.face_normal == b.face_normal && a.extent == b.extent && a.weight == b.weight;
}

bool operator==(const SceneGraph& a, const SceneGraph& b) {
  if (a.workspace.min != b.workspace.min || a.workspace.max != b.workspace.max) return false;
  if (a.class_vocabulary != b.class_vocabulary || a.objects != b.objects) return false;
  if (a.obstacles.size() != b.obstacles.size()) return false;
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    if (!obstacle_equal(a.obstacles[i], b.obstacles[i])) return false;
  }
  return true;
}

}  // namespace sgprm
